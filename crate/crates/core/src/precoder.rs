//! Blockwise Hadamard precoding and deprecoding.
//!
//! Precoding multiplies a block of modulated symbols by the orthonormal
//! Sylvester Hadamard matrix, spreading every input symbol over all
//! output symbols with weight `+-1/sqrt(n)`. The matrix is its own
//! inverse, so deprecoding is the same transform; the `kind` tag keeps
//! the two directions from being applied twice.

use crate::error::{Error, Result};
use crate::numerics::{fwht_in_place, is_power_of_two};
use crate::scalar::{Cplx, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    Modulated,
    Precoded,
}

impl BlockKind {
    fn name(self) -> &'static str {
        match self {
            BlockKind::Modulated => "modulated",
            BlockKind::Precoded => "precoded",
        }
    }
}

/// One precoder block of `n` complex symbols.
#[derive(Clone, Debug)]
pub struct SymbolBlock<T> {
    kind: BlockKind,
    symbols: Vec<Cplx<T>>,
}

impl<T: Scalar> SymbolBlock<T> {
    pub fn new(kind: BlockKind, symbols: Vec<Cplx<T>>) -> Result<Self> {
        if !is_power_of_two(symbols.len()) {
            return Err(Error::NotPowerOfTwo {
                what: "precoder block",
                len: symbols.len(),
            });
        }
        Ok(Self { kind, symbols })
    }

    pub fn modulated(symbols: Vec<Cplx<T>>) -> Result<Self> {
        Self::new(BlockKind::Modulated, symbols)
    }

    pub fn precoded(symbols: Vec<Cplx<T>>) -> Result<Self> {
        Self::new(BlockKind::Precoded, symbols)
    }

    pub fn kind(&self) -> BlockKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Cplx<T>] {
        &self.symbols
    }

    pub fn into_symbols(self) -> Vec<Cplx<T>> {
        self.symbols
    }

    pub fn power(&self) -> T {
        self.symbols.iter().map(|s| s.norm_sqr()).sum()
    }

    fn transform(mut self, from: BlockKind, to: BlockKind) -> Result<Self> {
        if self.kind != from {
            return Err(Error::WrongBlockKind {
                kind: self.kind.name(),
                required: from.name(),
            });
        }
        fwht_in_place(&mut self.symbols)?;
        self.kind = to;
        Ok(self)
    }
}

/// Hadamard-precode a modulated block.
pub fn precode<T: Scalar>(block: SymbolBlock<T>) -> Result<SymbolBlock<T>> {
    block.transform(BlockKind::Modulated, BlockKind::Precoded)
}

/// Invert the precoding (transpose multiply; the matrix is symmetric).
pub fn deprecode<T: Scalar>(block: SymbolBlock<T>) -> Result<SymbolBlock<T>> {
    block.transform(BlockKind::Precoded, BlockKind::Modulated)
}
