pub mod exactlinalg;
pub mod crystal;
pub mod cohomology;
pub mod manybody;
pub mod berry;
