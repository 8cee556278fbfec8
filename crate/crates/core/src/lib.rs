pub mod decomposition;
pub mod ensemble;
pub mod error;
pub mod qstate;
pub mod rates;
pub mod iepsilon;
pub mod region;
pub mod schumacher;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/ensembles.md")]
    mod ensembles {}
    #[doc = include_str!("../../../book/src/decomposition.md")]
    mod decomposition {}
    #[doc = include_str!("../../../book/src/rates.md")]
    mod rates {}
    #[doc = include_str!("../../../book/src/regions.md")]
    mod regions {}
    #[doc = include_str!("../../../book/src/schumacher.md")]
    mod schumacher {}
    #[doc = include_str!("../../../book/src/iepsilon.md")]
    mod iepsilon {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
