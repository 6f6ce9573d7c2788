//! Presentations of symmetric groups and the search for homomorphic
//! sections of a finite extension `E → S_n`.

use std::collections::{HashMap, HashSet, VecDeque};

use log::{debug, info};

use crate::engine::{EngineError, GroupSet};
use crate::modmatrix::{permutation_image, Code, ModMatrix};
use crate::perm::{factorial, generate, Permutation};

/// A relator as a word in the presentation generators: letter `k > 0` is
/// generator `k` (1-based), `k < 0` its inverse.
pub type Relator = Vec<i32>;

/// Generators of `S_n` together with relators that hold among them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnPresentation {
    pub degree: usize,
    pub generators: Vec<Permutation>,
    pub relators: Vec<Relator>,
}

fn power(word: &[i32], k: usize) -> Relator {
    word.iter().copied().cycle().take(word.len() * k).collect()
}

impl SnPresentation {
    /// The default presentation for `S_n`: the (2,3,4) triangle group on
    /// `a = (1 2)`, `b = (2 3 4)` when `n = 4`, the Coxeter presentation on
    /// adjacent transpositions otherwise.
    pub fn standard(n: usize) -> Self {
        if n == 4 {
            Self::triangle_s4()
        } else {
            Self::coxeter(n)
        }
    }

    /// `⟨a, b | a², b³, (ab)⁴⟩` with `a = (1 2)`, `b = (2 3 4)`.
    pub fn triangle_s4() -> Self {
        SnPresentation {
            degree: 4,
            generators: vec![
                Permutation::transposition(4, 1, 2).expect("valid"),
                Permutation::cycle(4, &[2, 3, 4]).expect("valid"),
            ],
            relators: vec![vec![1, 1], vec![2, 2, 2], power(&[1, 2], 4)],
        }
    }

    /// `s_i = (i i+1)` with `s_i²`, `(s_i s_{i+1})³` and `(s_i s_j)²` for
    /// `|i − j| ≥ 2`.
    pub fn coxeter(n: usize) -> Self {
        let generators = (1..n).map(|i| Permutation::transposition(n, i, i + 1).expect("valid")).collect();
        let mut relators = Vec::new();
        for i in 1..n as i32 {
            relators.push(vec![i, i]);
        }
        for i in 1..n as i32 {
            for j in i + 1..n as i32 {
                let k = if j == i + 1 { 3 } else { 2 };
                relators.push(power(&[i, j], k));
            }
        }
        SnPresentation { degree: n, generators, relators }
    }

    /// Checks that every relator holds on the generators and that the
    /// generators produce all `n!` permutations.
    pub fn validate(&self) -> Result<(), EngineError> {
        let r = self.generators.len() as i32;
        if self.generators.iter().any(|g| g.degree() != self.degree) {
            return Err(EngineError::InvalidPresentation("generator of the wrong degree".into()));
        }
        for rel in &self.relators {
            if rel.iter().any(|&k| k == 0 || k.abs() > r) {
                return Err(EngineError::InvalidPresentation(format!("relator {rel:?} uses an unknown generator")));
            }
            let mut acc = Permutation::identity(self.degree);
            for &k in rel {
                let g = &self.generators[k.unsigned_abs() as usize - 1];
                let g = if k > 0 { g.clone() } else { g.inverse() };
                acc = acc.compose(&g).expect("same degree");
            }
            if !acc.is_identity() {
                return Err(EngineError::InvalidPresentation(format!("relator {rel:?} fails on the generators")));
            }
        }
        let order = generate(self.degree, &self.generators).expect("same degree").len() as u64;
        if order != factorial(self.degree) {
            return Err(EngineError::InvalidPresentation(format!(
                "generators produce a group of order {order}, not {}",
                factorial(self.degree)
            )));
        }
        Ok(())
    }
}

/// Knobs for [`find_section_with`].
#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    /// Maximum number of partial assignments examined.
    pub node_budget: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { node_budget: 50_000_000 }
    }
}

/// Section search for `E → S_n` with `g ↦ permutation_image(g mod 2)`.
///
/// Returns preimages of the presentation generators that satisfy every
/// relator, or `None` if no such tuple exists anywhere in the fibers, in
/// which case no homomorphic section exists.
pub fn find_presentation_section(
    e: &GroupSet,
    presentation: &SnPresentation,
) -> Result<Option<Vec<ModMatrix>>, EngineError> {
    if !e.modulus().is_multiple_of(2) {
        return Err(EngineError::WrongModulus { expected: 2, found: e.modulus() });
    }
    if e.dim() != presentation.degree {
        return Err(EngineError::DimensionMismatch { expected: presentation.degree, found: e.dim() });
    }
    find_section_with(e, presentation, mod2_permutation, &SearchOptions::default())
}

fn mod2_permutation(g: &ModMatrix) -> Option<Permutation> {
    permutation_image(&g.reduce_to(2).ok()?).ok().flatten()
}

/// Section search against an arbitrary projection `E → S_n`, which must be
/// a group homomorphism.
///
/// A returned witness is always re-checked: the subgroup it generates must
/// have order `n!`, so that the projection restricts to an isomorphism on
/// it and its inverse is a section.
pub fn find_section_with<P>(
    e: &GroupSet,
    presentation: &SnPresentation,
    projection: P,
    options: &SearchOptions,
) -> Result<Option<Vec<ModMatrix>>, EngineError>
where
    P: Fn(&ModMatrix) -> Option<Permutation> + Sync,
{
    presentation.validate()?;
    let n = presentation.degree;
    let elements = e.matrices();

    let mut image: HashSet<Permutation> = HashSet::new();
    let mut fibers: Vec<Vec<(ModMatrix, ModMatrix)>> = vec![Vec::new(); presentation.generators.len()];
    for g in &elements {
        let p = projection(g).ok_or_else(|| {
            EngineError::ProjectionNotSurjective(format!("element {g:?} has no permutation image"))
        })?;
        for (j, t) in presentation.generators.iter().enumerate() {
            if *t == p {
                fibers[j].push((g.clone(), g.inverse().ok_or(EngineError::NotInvertible(e.modulus()))?));
            }
        }
        image.insert(p);
    }
    if image.len() as u64 != factorial(n) {
        return Err(EngineError::ProjectionNotSurjective(format!(
            "image has {} elements, expected {}",
            image.len(),
            factorial(n)
        )));
    }

    // Relators become checkable once their highest generator is assigned.
    let depth_of = |rel: &Relator| rel.iter().map(|k| k.unsigned_abs() as usize - 1).max().unwrap_or(0);
    let mut ready: Vec<Vec<&Relator>> = vec![Vec::new(); fibers.len()];
    for rel in &presentation.relators {
        ready[depth_of(rel)].push(rel);
    }
    // Relators in a single generator prune its fiber up front.
    for (j, fiber) in fibers.iter_mut().enumerate() {
        let own: Vec<&Relator> = ready[j].iter().copied().filter(|rel| rel.iter().all(|k| k.unsigned_abs() as usize - 1 == j)).collect();
        let before = fiber.len();
        fiber.retain(|(m, m_inv)| {
            own.iter().all(|rel| {
                let pick = |k: i32| if k > 0 { m } else { m_inv };
                relator_holds(rel, e.dim(), e.modulus(), |k| pick(k))
            })
        });
        debug!("fiber {j}: {before} preimages, {} after single-generator relators", fiber.len());
    }
    info!("section search: fiber sizes {:?}", fibers.iter().map(Vec::len).collect::<Vec<_>>());

    let mut choice: Vec<usize> = Vec::with_capacity(fibers.len());
    let mut nodes = 0u64;
    let found = search(&fibers, &ready, &mut choice, &mut nodes, options.node_budget, e.dim(), e.modulus())?;
    info!("section search examined {nodes} nodes");
    let Some(idx) = found else {
        return Ok(None);
    };
    let witness: Vec<ModMatrix> = idx.iter().enumerate().map(|(j, &i)| fibers[j][i].0.clone()).collect();
    let generated = GroupSet::close(&witness)?;
    if generated.order() as u64 != factorial(n) {
        return Err(EngineError::PresentationIncomplete { found: generated.order(), expected: factorial(n) as usize });
    }
    Ok(Some(witness))
}

fn relator_holds<'a, F>(rel: &Relator, dim: usize, modulus: u64, letter: F) -> bool
where
    F: Fn(i32) -> &'a ModMatrix,
{
    let mut acc = ModMatrix::identity(dim, modulus);
    for &k in rel {
        acc = acc.mul_unchecked(letter(k));
    }
    acc.is_identity()
}

fn search(
    fibers: &[Vec<(ModMatrix, ModMatrix)>],
    ready: &[Vec<&Relator>],
    choice: &mut Vec<usize>,
    nodes: &mut u64,
    budget: u64,
    dim: usize,
    modulus: u64,
) -> Result<Option<Vec<usize>>, EngineError> {
    let depth = choice.len();
    if depth == fibers.len() {
        return Ok(Some(choice.clone()));
    }
    for i in 0..fibers[depth].len() {
        *nodes += 1;
        if *nodes > budget {
            return Err(EngineError::SearchBudget(budget));
        }
        choice.push(i);
        let ok = ready[depth].iter().all(|rel| {
            relator_holds(rel, dim, modulus, |k| {
                let (m, m_inv) = &fibers[k.unsigned_abs() as usize - 1][choice[k.unsigned_abs() as usize - 1]];
                if k > 0 {
                    m
                } else {
                    m_inv
                }
            })
        });
        if ok {
            if let Some(w) = search(fibers, ready, choice, nodes, budget, dim, modulus)? {
                return Ok(Some(w));
            }
        }
        choice.pop();
    }
    Ok(None)
}

/// A homomorphism from a finite matrix group onto a permutation group,
/// tabulated from images of generators.
#[derive(Clone, Debug)]
pub struct PermutationTable {
    dim: usize,
    modulus: u64,
    table: HashMap<Code, Permutation>,
}

impl PermutationTable {
    /// Closes the pairs `(g_i, p_i)` jointly. Fails if some matrix would be
    /// sent to two different permutations, i.e. the assignment does not
    /// extend to a homomorphism.
    pub fn from_generator_images(pairs: &[(ModMatrix, Permutation)]) -> Result<Self, EngineError> {
        let (first, p0) = pairs.first().ok_or(EngineError::NoGenerators)?;
        let (dim, modulus, degree) = (first.dim(), first.modulus(), p0.degree());
        let mut steps = Vec::new();
        for (m, p) in pairs {
            steps.push((m.clone(), p.clone()));
            steps.push((m.inverse().ok_or(EngineError::NotInvertible(modulus))?, p.inverse()));
        }
        let id = (ModMatrix::identity(dim, modulus), Permutation::identity(degree));
        let mut table = HashMap::from([(id.0.encode(), id.1.clone())]);
        let mut queue = VecDeque::from([id]);
        while let Some((m, p)) = queue.pop_front() {
            for (sm, sp) in &steps {
                let nm = m.mul(sm)?;
                let np = p.compose(sp).map_err(|e| EngineError::InvalidPresentation(e.to_string()))?;
                match table.get(&nm.encode()) {
                    Some(q) if *q != np => {
                        return Err(EngineError::InvalidPresentation(
                            "generator images do not define a homomorphism".into(),
                        ))
                    }
                    Some(_) => {}
                    None => {
                        table.insert(nm.encode(), np.clone());
                        queue.push_back((nm, np));
                    }
                }
            }
        }
        Ok(PermutationTable { dim, modulus, table })
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Image of `g`, reducing to the table's modulus first.
    pub fn project(&self, g: &ModMatrix) -> Option<Permutation> {
        if g.dim() != self.dim {
            return None;
        }
        let r = g.reduce_to(self.modulus).ok()?;
        self.table.get(&r.encode()).cloned()
    }
}
