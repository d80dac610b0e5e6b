pub mod binding;
pub mod classes;
pub mod cli;
pub mod el;
pub mod io;
pub mod kb;
pub mod mln;
pub mod numeric;
pub mod oracle;
pub mod rank;
