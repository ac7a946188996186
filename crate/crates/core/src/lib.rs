pub mod cellcx;
pub mod cli;
pub mod disent;
pub mod equivar;
pub mod fixtures;
pub mod icss;
pub mod intlin;
pub mod multipt;
