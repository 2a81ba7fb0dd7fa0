use std::collections::{HashMap, VecDeque};

use crate::exactlinalg::IntMatrix;

use super::CrystalError;

/// A finite group of unimodular integer matrices with its multiplication table.
///
/// Element 0 is the identity. Elements are ordered by breadth-first search over
/// words in the generators, so the order is fixed by the generator list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointGroupAction {
    dim: usize,
    elements: Vec<IntMatrix>,
    table: Vec<Vec<usize>>,
    generators: Vec<usize>,
    generator_names: Vec<String>,
}

/// Output of [`validate_group`].
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct GroupReport {
    pub order: usize,
    pub element_orders: Vec<usize>,
}

const MAX_ORDER: usize = 1024;

impl PointGroupAction {
    pub fn trivial(dim: usize) -> Self {
        Self::from_generators(dim, &[]).expect("trivial group")
    }

    pub fn from_generators(dim: usize, gens: &[(String, IntMatrix)]) -> Result<Self, CrystalError> {
        for (name, g) in gens {
            if g.rows() != dim || g.cols() != dim {
                return Err(CrystalError::BadMatrix {
                    name: name.clone(),
                    reason: format!("expected {dim}x{dim}, got {}x{}", g.rows(), g.cols()),
                });
            }
            if !g.is_unimodular() {
                return Err(CrystalError::BadMatrix {
                    name: name.clone(),
                    reason: "not unimodular".into(),
                });
            }
        }
        let mut elements = vec![IntMatrix::identity(dim)];
        let mut index: HashMap<IntMatrix, usize> = HashMap::from([(elements[0].clone(), 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(e) = queue.pop_front() {
            for (_, g) in gens {
                let p = g * &elements[e];
                if !index.contains_key(&p) {
                    if elements.len() >= MAX_ORDER {
                        return Err(CrystalError::InfiniteGroup);
                    }
                    index.insert(p.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(p);
                }
            }
        }
        let generators = gens.iter().map(|(_, g)| index[g]).collect();
        let generator_names = gens.iter().map(|(n, _)| n.clone()).collect();
        Self::assemble(dim, elements, generators, generator_names)
    }

    /// Builds from an explicit element list. The table is computed from the
    /// matrices; closure failure is reported with the offending pair.
    pub fn from_elements(
        dim: usize,
        elements: Vec<IntMatrix>,
        generators: Vec<usize>,
        generator_names: Vec<String>,
    ) -> Result<Self, CrystalError> {
        Self::assemble(dim, elements, generators, generator_names)
    }

    fn assemble(
        dim: usize,
        elements: Vec<IntMatrix>,
        generators: Vec<usize>,
        generator_names: Vec<String>,
    ) -> Result<Self, CrystalError> {
        let index: HashMap<&IntMatrix, usize> =
            elements.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut table = vec![vec![0; elements.len()]; elements.len()];
        for (i, a) in elements.iter().enumerate() {
            for (j, b) in elements.iter().enumerate() {
                let p = a * b;
                table[i][j] = *index.get(&p).ok_or(CrystalError::NotClosed { left: i, right: j })?;
            }
        }
        let g = Self {
            dim,
            elements,
            table,
            generators,
            generator_names,
        };
        validate_group(&g)?;
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[IntMatrix] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &IntMatrix {
        &self.elements[i]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order())
            .find(|&b| self.table[a][b] == 0)
            .expect("validated group has inverses")
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut n = 1;
        while x != 0 {
            x = self.table[x][a];
            n += 1;
        }
        n
    }

    /// Cyclic iff some element generates everything.
    pub fn cyclic_generator(&self) -> Option<usize> {
        (0..self.order()).find(|&a| self.element_order(a) == self.order())
    }

    /// Element indices written as products of generators, in BFS order:
    /// `words[e]` lists generator slots `s` with `e = g_{s0} g_{s1} ...`.
    pub fn words(&self) -> Vec<Vec<usize>> {
        let mut words: Vec<Option<Vec<usize>>> = vec![None; self.order()];
        words[0] = Some(Vec::new());
        let mut queue = VecDeque::from([0usize]);
        while let Some(e) = queue.pop_front() {
            for (slot, &g) in self.generators.iter().enumerate() {
                let p = self.table[g][e];
                if words[p].is_none() {
                    let mut w = vec![slot];
                    w.extend(words[e].as_ref().unwrap());
                    words[p] = Some(w);
                    queue.push_back(p);
                }
            }
        }
        words.into_iter().map(|w| w.unwrap_or_default()).collect()
    }

    /// Applies `f` elementwise, keeping indices and table. Fails if the image
    /// does not respect the table (not a homomorphism).
    pub fn map_elements<F: Fn(&IntMatrix) -> IntMatrix>(&self, f: F) -> Result<Self, CrystalError> {
        let elements: Vec<IntMatrix> = self.elements.iter().map(f).collect();
        let dim = elements.first().map_or(self.dim, IntMatrix::rows);
        let g = Self::assemble(
            dim,
            elements,
            self.generators.clone(),
            self.generator_names.clone(),
        )?;
        if g.table != self.table {
            return Err(CrystalError::NotHomomorphism);
        }
        Ok(g)
    }
}

/// Checks identity, closure, associativity, inverses and finite orders.
pub fn validate_group(g: &PointGroupAction) -> Result<GroupReport, CrystalError> {
    let n = g.elements.len();
    if n == 0 || g.elements[0] != IntMatrix::identity(g.dim) {
        return Err(CrystalError::MissingIdentity);
    }
    for (i, m) in g.elements.iter().enumerate() {
        if !m.is_unimodular() {
            return Err(CrystalError::BadMatrix {
                name: format!("element {i}"),
                reason: "not unimodular".into(),
            });
        }
    }
    for i in 0..n {
        for j in 0..n {
            if g.table[i][j] >= n || g.elements[g.table[i][j]] != &g.elements[i] * &g.elements[j] {
                return Err(CrystalError::NotClosed { left: i, right: j });
            }
        }
        if !(0..n).any(|j| g.table[i][j] == 0 && g.table[j][i] == 0) {
            return Err(CrystalError::NoInverse { element: i });
        }
    }
    // Matrix multiplication is associative; spot-check the table anyway.
    for i in 0..n.min(8) {
        for j in 0..n {
            for k in 0..n.min(8) {
                if g.table[g.table[i][j]][k] != g.table[i][g.table[j][k]] {
                    return Err(CrystalError::NotAssociative { a: i, b: j, c: k });
                }
            }
        }
    }
    let element_orders = (0..n).map(|a| g.element_order(a)).collect();
    Ok(GroupReport {
        order: n,
        element_orders,
    })
}
