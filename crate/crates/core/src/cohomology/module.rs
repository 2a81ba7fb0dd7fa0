use crate::crystal::PointGroupAction;
use crate::exactlinalg::{exterior_power_matrix, smith_normal_form, IntMatrix};

use super::CohomologyError;

/// A `P`-module structure on `Z^rank`, one matrix per group element.
///
/// Matrices may repeat (the action need not be faithful), so the table is
/// stored alongside rather than recomputed from the matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PModule {
    rank: usize,
    action: Vec<IntMatrix>,
    table: Vec<Vec<usize>>,
}

impl PModule {
    pub fn new(rank: usize, action: Vec<IntMatrix>, table: Vec<Vec<usize>>) -> Result<Self, CohomologyError> {
        let n = action.len();
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(CohomologyError::BadModule("table shape does not match element count".into()));
        }
        if action.iter().any(|m| m.rows() != rank || m.cols() != rank) {
            return Err(CohomologyError::BadModule(format!("action matrices must be {rank}x{rank}")));
        }
        if n == 0 || action[0] != IntMatrix::identity(rank) {
            return Err(CohomologyError::BadModule("element 0 must act as the identity".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if action[table[i][j]] != &action[i] * &action[j] {
                    return Err(CohomologyError::BadModule(format!(
                        "action does not respect the product of elements {i} and {j}"
                    )));
                }
            }
        }
        Ok(Self { rank, action, table })
    }

    /// `Z^rank` with every element acting trivially.
    pub fn trivial(group: &PointGroupAction, rank: usize) -> Self {
        Self {
            rank,
            action: vec![IntMatrix::identity(rank); group.order()],
            table: group.table().to_vec(),
        }
    }

    /// `Λ^q` of the group's own matrices.
    pub fn exterior_power(group: &PointGroupAction, q: usize) -> Result<Self, CohomologyError> {
        let action = group
            .elements()
            .iter()
            .map(|m| exterior_power_matrix(m, q))
            .collect::<Result<Vec<_>, _>>()?;
        let rank = action[0].rows();
        Self::new(rank, action, group.table().to_vec())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn action(&self) -> &[IntMatrix] {
        &self.action
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn order(&self) -> usize {
        self.action.len()
    }

    fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut n = 1;
        while x != 0 {
            x = self.table[x][a];
            n += 1;
        }
        n
    }

    /// First element (by index) generating the whole group, if cyclic.
    pub fn cyclic_generator(&self) -> Option<usize> {
        (0..self.order()).find(|&a| self.element_order(a) == self.order())
    }

    /// Norm element `N = Σ_g g`.
    pub fn norm(&self) -> IntMatrix {
        let mut n = IntMatrix::zeros(self.rank, self.rank);
        for m in &self.action {
            for i in 0..self.rank {
                for j in 0..self.rank {
                    n[(i, j)] += &m[(i, j)];
                }
            }
        }
        n
    }
}

/// Rank of the invariant sublattice `∩_g ker(g - I)`.
pub fn invariant_rank(module: &PModule) -> usize {
    let r = module.rank();
    if r == 0 {
        return 0;
    }
    let id = IntMatrix::identity(r);
    let blocks: Vec<IntMatrix> = module
        .action()
        .iter()
        .map(|m| m.checked_sub(&id).expect("square"))
        .collect();
    let refs: Vec<&IntMatrix> = blocks.iter().collect();
    let stacked = IntMatrix::vstack(&refs, r).expect("equal widths");
    r - smith_normal_form(&stacked).rank()
}
