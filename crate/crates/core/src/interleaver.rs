//! Time-frequency interleaving of precoded blocks onto the OFDM grid.
//!
//! Symbols of one block are written with a frequency stride and, when a
//! stride pass wraps past the last subcarrier, a time stride, so that
//! any two symbols of the same block are separated by at least `df`
//! subcarriers or `dt` symbol periods. Blocks are packed greedily in
//! row-major order until the grid is tiled exactly; construction fails
//! loudly if the parameters cannot tile.
//!
//! The placement stride is `df` rounded up to the next divisor of `s`
//! (`s` is a power of two). Rounding keeps the assignment a bijection
//! for strides such as 40 on a 512-carrier grid while only widening the
//! guaranteed separation.
//!
//! A consecutive mapping with block size equal to the carrier count is
//! also provided; it reproduces the classic OFDM-CDM arrangement where
//! each block fills one OFDM symbol.

use crate::error::{Error, Result};
use crate::numerics::is_power_of_two;
use crate::precoder::{BlockKind, SymbolBlock};
use crate::scalar::{Cplx, Scalar};

/// Frequency-domain frame: `s` subcarriers by `t` symbol periods.
#[derive(Clone, Debug)]
pub struct OfdmGrid<T> {
    s: usize,
    t: usize,
    cells: Vec<Cplx<T>>,
}

impl<T: Scalar> OfdmGrid<T> {
    pub fn zeroed(s: usize, t: usize) -> Self {
        Self {
            s,
            t,
            cells: vec![Cplx::new(T::zero(), T::zero()); s * t],
        }
    }

    pub fn from_cells(s: usize, t: usize, cells: Vec<Cplx<T>>) -> Result<Self> {
        if cells.len() != s * t {
            return Err(Error::SizeMismatch {
                what: "grid cells",
                expected: s * t,
                got: cells.len(),
            });
        }
        Ok(Self { s, t, cells })
    }

    pub fn subcarriers(&self) -> usize {
        self.s
    }

    pub fn periods(&self) -> usize {
        self.t
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    #[inline]
    pub fn cell(&self, f: usize, t: usize) -> Cplx<T> {
        self.cells[t * self.s + f]
    }

    #[inline]
    pub fn cell_mut(&mut self, f: usize, t: usize) -> &mut Cplx<T> {
        &mut self.cells[t * self.s + f]
    }

    pub fn cells(&self) -> &[Cplx<T>] {
        &self.cells
    }

    pub fn cells_mut(&mut self) -> &mut [Cplx<T>] {
        &mut self.cells
    }

    pub fn power(&self) -> T {
        self.cells.iter().map(|c| c.norm_sqr()).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapKind {
    /// Stride placement with greedy block packing.
    Strided,
    /// Block `b` occupies subcarriers `0..s` of symbol period `b`.
    Consecutive,
}

/// Immutable assignment of (block, in-block index) pairs to grid cells.
#[derive(Clone, Debug)]
pub struct GridMap {
    s: usize,
    t: usize,
    n: usize,
    df: usize,
    dt: usize,
    df_eff: usize,
    kind: MapKind,
    /// (f0, t0) anchor per block; empty for consecutive maps.
    anchors: Vec<(u32, u32)>,
}

impl GridMap {
    /// Strided interleaving map. `t = 0` selects the smallest frame that
    /// the block tiling admits.
    pub fn strided(s: usize, t: usize, n: usize, df: usize, dt: usize) -> Result<Self> {
        if !is_power_of_two(s) {
            return Err(Error::NotPowerOfTwo {
                what: "subcarrier count",
                len: s,
            });
        }
        if !is_power_of_two(n) {
            return Err(Error::NotPowerOfTwo {
                what: "block size",
                len: n,
            });
        }
        if df == 0 || df > s {
            return Err(Error::InvalidParameter {
                name: "df",
                reason: format!("must be in 1..={s}, got {df}"),
            });
        }
        if dt == 0 {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: "must be >= 1".into(),
            });
        }

        // Placement stride: prefer the largest divisor of s no bigger
        // than s/2, so a block forms two frequency columns half the band
        // apart with the rest spread across time (the robust diversity
        // axis). When an explicit frame length cannot hold that span,
        // fall back toward denser frequency packing until the tiling
        // fits. The stride never drops below the next divisor >= df.
        let min_eff = df.next_power_of_two().min(s).max(1);
        let span_for = |d: usize| {
            let rows = (n / (s / d)).max(1);
            if rows == 1 {
                1
            } else {
                dt * rows
            }
        };
        let mut df_eff = if min_eff <= s / 2 { s / 2 } else { min_eff };
        if t != 0 {
            let mut d = df_eff;
            while d > min_eff && (span_for(d) > t || !t.is_multiple_of(span_for(d))) {
                d /= 2;
            }
            df_eff = d;
        }
        let span = span_for(df_eff);
        let t = if t == 0 { span } else { t };
        if !t.is_multiple_of(span) {
            return Err(Error::MapConstruction {
                reason: format!("t = {t} is not a multiple of the block tiling span {span}"),
            });
        }
        if !(s * t).is_multiple_of(n) {
            return Err(Error::MapConstruction {
                reason: format!("grid of {} cells is not divisible by block size {n}", s * t),
            });
        }

        let mut map = Self {
            s,
            t,
            n,
            df,
            dt,
            df_eff,
            kind: MapKind::Strided,
            anchors: Vec::with_capacity(s * t / n),
        };
        map.pack()?;
        Ok(map)
    }

    /// OFDM-CDM style consecutive map (block size = subcarrier count).
    pub fn consecutive(s: usize, t: usize) -> Result<Self> {
        if !is_power_of_two(s) {
            return Err(Error::NotPowerOfTwo {
                what: "subcarrier count",
                len: s,
            });
        }
        let t = if t == 0 { 1 } else { t };
        Ok(Self {
            s,
            t,
            n: s,
            df: 1,
            dt: 1,
            df_eff: 1,
            kind: MapKind::Consecutive,
            anchors: Vec::new(),
        })
    }

    /// Greedy row-major packing; verifies the assignment is a bijection.
    fn pack(&mut self) -> Result<()> {
        let cells = self.s * self.t;
        let blocks = cells / self.n;
        let mut taken = vec![false; cells];
        let mut cursor = 0usize;

        for _ in 0..blocks {
            while cursor < cells && taken[cursor] {
                cursor += 1;
            }
            if cursor >= cells {
                return Err(Error::MapConstruction {
                    reason: "ran out of free anchor cells before placing all blocks".into(),
                });
            }
            let f0 = cursor % self.s;
            let t0 = cursor / self.s;
            for j in 0..self.n {
                let (f, t) = self.place(f0, t0, j);
                if t >= self.t {
                    return Err(Error::MapConstruction {
                        reason: format!(
                            "block anchored at (f={f0}, t={t0}) exceeds the frame: \
                             symbol {j} lands at period {t} >= {}",
                            self.t
                        ),
                    });
                }
                let idx = t * self.s + f;
                if taken[idx] {
                    return Err(Error::MapConstruction {
                        reason: format!(
                            "collision: block anchored at (f={f0}, t={t0}) symbol {j} \
                             lands on occupied cell (f={f}, t={t})"
                        ),
                    });
                }
                taken[idx] = true;
            }
            self.anchors.push((f0 as u32, t0 as u32));
        }

        debug_assert!(taken.iter().all(|&b| b), "tiling left holes");
        Ok(())
    }

    #[inline]
    fn place(&self, f0: usize, t0: usize, j: usize) -> (usize, usize) {
        let p = f0 + j * self.df_eff;
        (p % self.s, t0 + self.dt * (p / self.s))
    }

    /// Grid cell of symbol `j` of block `b`.
    #[inline]
    pub fn cell_of(&self, b: usize, j: usize) -> (usize, usize) {
        match self.kind {
            MapKind::Strided => {
                let (f0, t0) = self.anchors[b];
                self.place(f0 as usize, t0 as usize, j)
            }
            MapKind::Consecutive => (j, b),
        }
    }

    pub fn subcarriers(&self) -> usize {
        self.s
    }

    pub fn periods(&self) -> usize {
        self.t
    }

    pub fn block_size(&self) -> usize {
        self.n
    }

    pub fn num_blocks(&self) -> usize {
        self.s * self.t / self.n
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    /// Requested frequency stride.
    pub fn df(&self) -> usize {
        self.df
    }

    /// Placement stride actually used (`df` rounded up to a divisor of `s`).
    pub fn df_eff(&self) -> usize {
        self.df_eff
    }

    pub fn dt(&self) -> usize {
        self.dt
    }

    /// Exhaustive check that every same-block pair is separated by at
    /// least `df_min` subcarriers (cyclic) or `dt_min` symbol periods.
    pub fn verify_min_separation(&self, df_min: usize, dt_min: usize) -> Result<()> {
        for b in 0..self.num_blocks() {
            let cells: Vec<(usize, usize)> = (0..self.n).map(|j| self.cell_of(b, j)).collect();
            for i in 0..cells.len() {
                for j in i + 1..cells.len() {
                    let (fi, ti) = cells[i];
                    let (fj, tj) = cells[j];
                    let raw = fi.abs_diff(fj);
                    let dfreq = raw.min(self.s - raw);
                    let dtime = ti.abs_diff(tj);
                    if dfreq < df_min && dtime < dt_min {
                        return Err(Error::MapConstruction {
                            reason: format!(
                                "block {b}: cells ({fi},{ti}) and ({fj},{tj}) are only \
                                 {dfreq} subcarriers / {dtime} periods apart"
                            ),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Scatter flat block-major symbols (`b * n + j`) onto the grid.
pub fn interleave_flat<T: Scalar>(symbols: &[Cplx<T>], map: &GridMap) -> Result<OfdmGrid<T>> {
    let expected = map.subcarriers() * map.periods();
    if symbols.len() != expected {
        return Err(Error::SizeMismatch {
            what: "interleaver input symbols",
            expected,
            got: symbols.len(),
        });
    }
    let mut grid = OfdmGrid::zeroed(map.subcarriers(), map.periods());
    let n = map.block_size();
    for b in 0..map.num_blocks() {
        for j in 0..n {
            let (f, t) = map.cell_of(b, j);
            *grid.cell_mut(f, t) = symbols[b * n + j];
        }
    }
    Ok(grid)
}

/// Exact inverse of [`interleave_flat`].
pub fn deinterleave_flat<T: Scalar>(grid: &OfdmGrid<T>, map: &GridMap) -> Result<Vec<Cplx<T>>> {
    if grid.subcarriers() != map.subcarriers() || grid.periods() != map.periods() {
        return Err(Error::SizeMismatch {
            what: "deinterleaver grid",
            expected: map.subcarriers() * map.periods(),
            got: grid.len(),
        });
    }
    let n = map.block_size();
    let mut out = Vec::with_capacity(grid.len());
    for b in 0..map.num_blocks() {
        for j in 0..n {
            let (f, t) = map.cell_of(b, j);
            out.push(grid.cell(f, t));
        }
    }
    Ok(out)
}

/// Interleave a frame of precoded blocks.
pub fn interleave<T: Scalar>(blocks: &[SymbolBlock<T>], map: &GridMap) -> Result<OfdmGrid<T>> {
    if blocks.len() != map.num_blocks() {
        return Err(Error::SizeMismatch {
            what: "block count",
            expected: map.num_blocks(),
            got: blocks.len(),
        });
    }
    let mut flat = Vec::with_capacity(map.subcarriers() * map.periods());
    for block in blocks {
        if block.kind() != BlockKind::Precoded {
            return Err(Error::WrongBlockKind {
                kind: "modulated",
                required: "precoded",
            });
        }
        if block.len() != map.block_size() {
            return Err(Error::SizeMismatch {
                what: "block length",
                expected: map.block_size(),
                got: block.len(),
            });
        }
        flat.extend_from_slice(block.symbols());
    }
    interleave_flat(&flat, map)
}

/// Collect grid cells back into precoded blocks.
pub fn deinterleave<T: Scalar>(grid: &OfdmGrid<T>, map: &GridMap) -> Result<Vec<SymbolBlock<T>>> {
    let flat = deinterleave_flat(grid, map)?;
    flat.chunks(map.block_size())
        .map(|c| SymbolBlock::precoded(c.to_vec()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::Streams;
    use rand::Rng;

    type C = Cplx<f64>;

    #[test]
    fn figure_pattern_8x32_block16() {
        // 8 subcarriers, stride 4/2, block of 16: block 0 must occupy
        // subcarriers {0, 4} on periods {0, 2, ..., 14}.
        let map = GridMap::strided(8, 32, 16, 4, 2).unwrap();
        assert_eq!(map.df_eff(), 4);
        let mut cells: Vec<(usize, usize)> = (0..16).map(|j| map.cell_of(0, j)).collect();
        cells.sort();
        let mut expect: Vec<(usize, usize)> = (0..8)
            .flat_map(|r| [(0usize, 2 * r), (4usize, 2 * r)])
            .collect();
        expect.sort();
        assert_eq!(cells, expect);
        map.verify_min_separation(4, 2).unwrap();
    }

    #[test]
    fn default_grid_strides_meet_paper_separation() {
        // 512 carriers with the coherence-derived strides; minimal frame.
        for n in [2usize, 4, 16, 64, 256, 512] {
            let map = GridMap::strided(512, 0, n, 40, 11).unwrap();
            assert_eq!(map.df_eff(), 256);
            map.verify_min_separation(40, 11).unwrap();
        }
    }

    #[test]
    fn single_symbol_blocks_are_trivially_valid() {
        let map = GridMap::strided(16, 4, 1, 5, 2).unwrap();
        assert_eq!(map.num_blocks(), 64);
        map.verify_min_separation(16, 4).unwrap(); // vacuous: no pairs
    }

    #[test]
    fn round_trip_is_exact() {
        let map = GridMap::strided(64, 0, 16, 8, 3).unwrap();
        let cells = map.subcarriers() * map.periods();
        let mut rng = Streams::new(11).stream(0);
        let syms: Vec<C> = (0..cells)
            .map(|_| C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let grid = interleave_flat(&syms, &map).unwrap();
        let p_in: f64 = syms.iter().map(|s| s.norm_sqr()).sum();
        assert!((grid.power() - p_in).abs() < 1e-12 * p_in);
        let back = deinterleave_flat(&grid, &map).unwrap();
        assert_eq!(syms, back);
    }

    #[test]
    fn single_block_fills_whole_grid() {
        // one block of 16 on an explicit 8x2 grid: the stride falls back
        // to fill every cell
        let map = GridMap::strided(8, 2, 8 * 2, 1, 1).unwrap();
        assert_eq!(map.num_blocks(), 1);
        assert_eq!(map.df_eff(), 1);
        let syms: Vec<C> = (0..16).map(|i| C::new(i as f64, 0.0)).collect();
        let grid = interleave_flat(&syms, &map).unwrap();
        for (j, s) in syms.iter().enumerate() {
            assert_eq!(grid.cell(j % 8, j / 8), *s);
        }
    }

    #[test]
    fn consecutive_map_matches_cdm_layout() {
        let map = GridMap::consecutive(512, 4).unwrap();
        assert_eq!(map.block_size(), 512);
        assert_eq!(map.num_blocks(), 4);
        for j in [0usize, 17, 511] {
            assert_eq!(map.cell_of(2, j), (j, 2));
        }
    }

    #[test]
    fn typed_block_interleave_checks_kinds() {
        let map = GridMap::strided(8, 0, 4, 2, 1).unwrap();
        let blocks: Vec<SymbolBlock<f64>> = (0..map.num_blocks())
            .map(|_| SymbolBlock::modulated(vec![C::new(1.0, 0.0); 4]).unwrap())
            .collect();
        assert!(matches!(
            interleave(&blocks, &map),
            Err(Error::WrongBlockKind { .. })
        ));
    }

    #[test]
    fn block_count_mismatch_rejected() {
        let map = GridMap::strided(8, 0, 4, 2, 1).unwrap();
        let blocks = vec![SymbolBlock::precoded(vec![C::new(1.0, 0.0); 4]).unwrap()];
        assert!(matches!(
            interleave(&blocks, &map),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn impossible_frame_reports_collision() {
        // t = 3 cannot hold the 4-period span of these blocks.
        let err = GridMap::strided(8, 3, 16, 4, 2).unwrap_err();
        assert!(matches!(err, Error::MapConstruction { .. }), "{err}");
    }

    #[test]
    fn bijectivity_pigeonhole_over_random_shapes() {
        let mut rng = Streams::new(13).stream(1);
        for _ in 0..40 {
            let s = 1usize << rng.gen_range(2..8);
            let n = 1usize << rng.gen_range(0..6);
            let df = rng.gen_range(1..=s);
            let dt = rng.gen_range(1..4);
            if let Ok(map) = GridMap::strided(s, 0, n, df, dt) {
                // cover every cell exactly once
                let cells = map.subcarriers() * map.periods();
                let mut seen = vec![false; cells];
                for b in 0..map.num_blocks() {
                    for j in 0..map.block_size() {
                        let (f, t) = map.cell_of(b, j);
                        let idx = t * map.subcarriers() + f;
                        assert!(!seen[idx]);
                        seen[idx] = true;
                    }
                }
                assert!(seen.iter().all(|&b| b));
            }
        }
    }
}
