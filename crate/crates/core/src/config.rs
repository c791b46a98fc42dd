//! Size guards. All limits are explicit constants; callers opt out with
//! [`Guards::unchecked`].

/// Largest width accepted by the exact (double-slice) transfer computation.
pub const MAX_EXACT_WIDTH: usize = 4;
/// Largest width accepted for numeric sector matrices.
pub const MAX_SECTOR_WIDTH: usize = 8;
/// Largest sector basis handled with a dense eigensolver; larger bases fall
/// back to restarted Arnoldi for the leading eigenvalue.
pub const MAX_DENSE_DIMENSION: usize = 600;
/// Largest width for fitting eigenvalue amplitudes against exact partition
/// functions.
pub const MAX_AMPLITUDE_WIDTH: usize = 3;
/// Edge cap for the subset-expansion oracle.
pub const MAX_FK_EDGES: usize = 24;
/// Edge cap for the loop-expansion oracle.
pub const MAX_LOOP_EDGES: usize = 20;
/// Cap on `Q^|V|` for the colouring oracle.
pub const MAX_COLORINGS: u128 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guards {
    pub max_exact_width: usize,
    pub max_sector_width: usize,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            max_exact_width: MAX_EXACT_WIDTH,
            max_sector_width: MAX_SECTOR_WIDTH,
        }
    }
}

impl Guards {
    pub fn unchecked() -> Self {
        Guards {
            max_exact_width: usize::MAX,
            max_sector_width: usize::MAX,
        }
    }
}
