//! Root data for the supported types: A1, A1xA1, A2, B2, G2 over a weight or
//! root lattice.
//!
//! A [`RootDatum`] packages the Cartan matrix, the full (positive) root
//! system with coroots, the finite Weyl group as integer matrices with
//! lexicographically least reduced words, the fundamental group Ω of
//! length-zero elements of the extended affine Weyl group, and the partial
//! order on the lattice used to index filtrations.
//!
//! Conventions, fixed once here and relied on everywhere else:
//!
//! * `cartan[i][j] = ⟨α_j, α̌_i⟩` (rows indexed by coroots).
//! * Weight coordinates are taken in the basis of fundamental weights when
//!   `lattice = Weight`, in the basis of simple roots when `lattice = Root`.
//! * Simple reflections of the finite group are indexed `0..n` internally;
//!   the affine index set used by the rest of the crate is `0` for the
//!   affine node (of the first component), `1..=n` for finite simples, and
//!   `n+1` for the affine node of the second component (A1xA1 only).
//! * The affine reflection of a component is `t_θ s_θ` for θ the highest
//!   short root of that component, so that its Iwahori–Matsumoto length is 1.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Supported Cartan types.
#[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord, Hash)]
pub enum RootSystemType {
    A1,
    A1xA1,
    A2,
    B2,
    G2,
}

impl RootSystemType {
    pub const ALL: [RootSystemType; 5] = [
        RootSystemType::A1,
        RootSystemType::A1xA1,
        RootSystemType::A2,
        RootSystemType::B2,
        RootSystemType::G2,
    ];

    /// Number of simple roots.
    pub fn rank(self) -> usize {
        match self {
            RootSystemType::A1 => 1,
            _ => 2,
        }
    }

    fn cartan_table(self) -> Vec<Vec<i64>> {
        match self {
            RootSystemType::A1 => vec![vec![2]],
            RootSystemType::A1xA1 => vec![vec![2, 0], vec![0, 2]],
            RootSystemType::A2 => vec![vec![2, -1], vec![-1, 2]],
            // α_1 long, α_2 short.
            RootSystemType::B2 => vec![vec![2, -1], vec![-2, 2]],
            // α_1 short, α_2 long.
            RootSystemType::G2 => vec![vec![2, -3], vec![-1, 2]],
        }
    }

    /// Symmetrizers d_i = (α_i, α_i)/2, normalized so short roots have d = 1.
    fn symmetrizers(self) -> Vec<i64> {
        match self {
            RootSystemType::A1 => vec![1],
            RootSystemType::A1xA1 | RootSystemType::A2 => vec![1, 1],
            RootSystemType::B2 => vec![2, 1],
            RootSystemType::G2 => vec![1, 3],
        }
    }

    /// Connected component of each simple root.
    fn components(self) -> Vec<usize> {
        match self {
            RootSystemType::A1 => vec![0],
            RootSystemType::A1xA1 => vec![0, 1],
            _ => vec![0, 0],
        }
    }

    /// Degrees of the fundamental Weyl-invariant polynomials.
    pub fn invariant_degrees(self) -> Vec<usize> {
        match self {
            RootSystemType::A1 => vec![2],
            RootSystemType::A1xA1 => vec![2, 2],
            RootSystemType::A2 => vec![2, 3],
            RootSystemType::B2 => vec![2, 4],
            RootSystemType::G2 => vec![2, 6],
        }
    }
}

impl fmt::Display for RootSystemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RootSystemType::A1 => "A1",
            RootSystemType::A1xA1 => "A1xA1",
            RootSystemType::A2 => "A2",
            RootSystemType::B2 => "B2",
            RootSystemType::G2 => "G2",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for RootSystemType {
    type Err = RootDataError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A1" | "a1" => Ok(RootSystemType::A1),
            "A1xA1" | "a1xa1" | "A1XA1" => Ok(RootSystemType::A1xA1),
            "A2" | "a2" => Ok(RootSystemType::A2),
            "B2" | "b2" => Ok(RootSystemType::B2),
            "G2" | "g2" => Ok(RootSystemType::G2),
            _ => Err(RootDataError::UnknownType(s.to_string())),
        }
    }
}

/// Which lattice 𝕏 the datum is built over.
#[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord, Hash)]
pub enum Lattice {
    /// 𝕏 = weight lattice; coordinates in fundamental weights; Ω = 𝕏/ℤΦ.
    Weight,
    /// 𝕏 = root lattice; coordinates in simple roots; Ω trivial.
    Root,
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Lattice::Weight => "weight",
            Lattice::Root => "root",
        })
    }
}

impl std::str::FromStr for Lattice {
    type Err = RootDataError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "weight" | "Weight" => Ok(Lattice::Weight),
            "root" | "Root" => Ok(Lattice::Root),
            _ => Err(RootDataError::UnknownLattice(s.to_string())),
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum RootDataError {
    #[error("unknown root system type `{0}`")]
    UnknownType(String),
    #[error("unknown lattice `{0}` (expected `weight` or `root`)")]
    UnknownLattice(String),
    #[error("weight has {got} coordinates, datum has rank {want}")]
    BadWeightRank { got: usize, want: usize },
    #[error("index {0} is not in the affine simple index set")]
    BadAffineIndex(usize),
    #[error("index {0} is not a finite simple index")]
    BadSimpleIndex(usize),
}

/// Element of the lattice 𝕏, as coordinates in the chosen basis.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Weight(vec![0; rank])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Weight {
        Weight(self.0.iter().map(|a| -a).collect())
    }

    pub fn scaled(&self, c: i64) -> Weight {
        Weight(self.0.iter().map(|a| c * a).collect())
    }

    /// Max-norm of the coordinate vector; used for test balls.
    pub fn norm(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Small dense integer matrix, row-major; the action of Weyl elements on 𝕏.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Mat {
    pub n: usize,
    pub a: Vec<i64>,
}

impl Mat {
    pub fn identity(n: usize) -> Self {
        let mut a = vec![0; n * n];
        for i in 0..n {
            a[i * n + i] = 1;
        }
        Mat { n, a }
    }

    pub fn at(&self, r: usize, c: usize) -> i64 {
        self.a[r * self.n + c]
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        let n = self.n;
        let mut a = vec![0i64; n * n];
        for i in 0..n {
            for k in 0..n {
                let s = self.at(i, k);
                if s == 0 {
                    continue;
                }
                for j in 0..n {
                    a[i * n + j] += s * other.at(k, j);
                }
            }
        }
        Mat { n, a }
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.at(i, j) * v[j]).sum())
            .collect()
    }

    /// Row covector times matrix; used to transport coroot pairings.
    pub fn apply_row(&self, row: &[i64]) -> Vec<i64> {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| row[i] * self.at(i, j)).sum())
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat::identity(self.n)
    }
}

/// A root together with its coroot, in every coordinate system we need.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Root {
    /// Coefficients over the simple roots (lattice independent).
    pub root_coeffs: Vec<i64>,
    /// Coefficients of the coroot over the simple coroots.
    pub coroot_coeffs: Vec<i64>,
    /// The root as an element of 𝕏 (in lattice coordinates).
    pub vec: Weight,
    /// Row covector with `⟨λ, γ̌⟩ = pairing · coords(λ)`.
    pub pairing: Vec<i64>,
    /// Squared length, normalized so short roots have 2.
    pub norm2: i64,
    /// Which irreducible component the root lives in.
    pub component: usize,
}

/// Element of the finite Weyl group: matrix on 𝕏 plus the lexicographically
/// least reduced word (internal simple indices, 0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteWeylElement {
    pub mat: Mat,
    pub word: Vec<u8>,
}

impl FiniteWeylElement {
    pub fn length(&self) -> usize {
        self.word.len()
    }

    /// Canonical sort/map key: length, then lex on the reduced word.
    pub fn key(&self) -> (usize, Vec<u8>) {
        (self.word.len(), self.word.clone())
    }
}

/// A length-zero element ω = t_{μ} w of the extended affine Weyl group.
#[derive(Clone, Debug)]
pub struct OmegaElement {
    pub translation: Weight,
    pub finite: FiniteWeylElement,
    /// Permutation of the affine simple index set induced by conjugation:
    /// ω s_i ω⁻¹ = s_{perm[k]} where the set is listed by `affine_index_set`.
    pub perm: BTreeMap<usize, usize>,
}

/// Root datum: everything about the finite group and the lattice.
#[derive(Clone, Debug)]
pub struct RootDatum {
    ctype: RootSystemType,
    lattice: Lattice,
    rank: usize,
    cartan: Vec<Vec<i64>>,
    positive_roots: Vec<Root>,
    /// All Weyl elements in BFS (length-then-lex) order; index 0 is e.
    weyl: Vec<FiniteWeylElement>,
    weyl_index: BTreeMap<Mat, usize>,
    weyl_inverse: Vec<usize>,
    /// ±root lookup: 𝕏-coordinates → (positive-root index, sign).
    root_lookup: BTreeMap<Vec<i64>, (usize, i64)>,
    /// Highest short root index per component.
    highest_short: Vec<usize>,
    /// Reflection in the highest short root, per component.
    s_theta: Vec<FiniteWeylElement>,
    omega: Vec<OmegaElement>,
}

impl RootDatum {
    pub fn new(ctype: RootSystemType, lattice: Lattice) -> Self {
        let rank = ctype.rank();
        let cartan = ctype.cartan_table();
        let d = ctype.symmetrizers();
        let comp = ctype.components();

        // Simple roots with their coroots; then close under simple
        // reflections to enumerate every root, keeping the positive ones.
        let mut roots: Vec<(Vec<i64>, Vec<i64>)> = Vec::new();
        for i in 0..rank {
            let mut rc = vec![0; rank];
            rc[i] = 1;
            let mut cc = vec![0; rank];
            cc[i] = 1;
            roots.push((rc, cc));
        }
        let mut all: Vec<(Vec<i64>, Vec<i64>)> = roots.clone();
        let mut queue = roots;
        while let Some((rc, cc)) = queue.pop() {
            for i in 0..rank {
                // ⟨γ, α̌_i⟩ and ⟨α_i, γ̌⟩ from the Cartan matrix.
                let pair_i: i64 = (0..rank).map(|j| cartan[i][j] * rc[j]).sum();
                let copair_i: i64 = (0..rank).map(|j| cc[j] * cartan[j][i]).sum();
                let mut nrc = rc.clone();
                nrc[i] -= pair_i;
                let mut ncc = cc.clone();
                ncc[i] -= copair_i;
                if !all.iter().any(|(r, _)| *r == nrc) {
                    all.push((nrc.clone(), ncc.clone()));
                    queue.push((nrc, ncc));
                }
            }
        }

        let to_x = |rc: &[i64]| -> Weight {
            match lattice {
                // α_j has weight coordinates = column j of the Cartan matrix.
                Lattice::Weight => Weight(
                    (0..rank)
                        .map(|i| (0..rank).map(|j| cartan[i][j] * rc[j]).sum())
                        .collect(),
                ),
                Lattice::Root => Weight(rc.to_vec()),
            }
        };
        let to_pairing = |cc: &[i64]| -> Vec<i64> {
            match lattice {
                // ⟨λ, α̌_i⟩ is the i-th fundamental-weight coordinate.
                Lattice::Weight => cc.to_vec(),
                Lattice::Root => (0..rank)
                    .map(|j| (0..rank).map(|i| cc[i] * cartan[i][j]).sum())
                    .collect(),
            }
        };

        let mut positive_roots: Vec<Root> = all
            .iter()
            .filter(|(rc, _)| rc.iter().all(|&c| c >= 0))
            .map(|(rc, cc)| {
                let norm2: i64 = (0..rank)
                    .map(|i| {
                        (0..rank)
                            .map(|j| rc[i] * rc[j] * d[i] * cartan[i][j])
                            .sum::<i64>()
                    })
                    .sum();
                let component = comp[rc.iter().position(|&c| c != 0).unwrap()];
                Root {
                    root_coeffs: rc.clone(),
                    coroot_coeffs: cc.clone(),
                    vec: to_x(rc),
                    pairing: to_pairing(cc),
                    norm2,
                    component,
                }
            })
            .collect();
        positive_roots.sort_by_key(|r| (r.root_coeffs.iter().sum::<i64>(), r.root_coeffs.clone()));
        debug_assert_eq!(2 * positive_roots.len(), all.len());

        // Finite Weyl group by BFS over right multiplication; first visit of
        // a matrix is via the length-then-lex least word.
        let simple_mats: Vec<Mat> = (0..rank)
            .map(|i| {
                let mut e = vec![0; rank];
                e[i] = 1;
                let veci = to_x(&e);
                let pairi = to_pairing(&e);
                let mut a = Mat::identity(rank);
                for (r, vr) in veci.0.iter().enumerate() {
                    for (c, pc) in pairi.iter().enumerate() {
                        a.a[r * rank + c] -= vr * pc;
                    }
                }
                a
            })
            .collect();

        let mut weyl: Vec<FiniteWeylElement> = vec![FiniteWeylElement {
            mat: Mat::identity(rank),
            word: vec![],
        }];
        let mut weyl_index = BTreeMap::new();
        weyl_index.insert(Mat::identity(rank), 0usize);
        let mut frontier = vec![0usize];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &idx in &frontier {
                let base = weyl[idx].clone();
                for (i, sm) in simple_mats.iter().enumerate() {
                    let m = base.mat.mul(sm);
                    if !weyl_index.contains_key(&m) {
                        let mut word = base.word.clone();
                        word.push(i as u8);
                        weyl_index.insert(m.clone(), weyl.len());
                        next.push(weyl.len());
                        weyl.push(FiniteWeylElement { mat: m, word });
                    }
                }
            }
            frontier = next;
        }

        let weyl_inverse: Vec<usize> = weyl
            .iter()
            .map(|w| {
                let mut m = Mat::identity(rank);
                for &i in w.word.iter().rev() {
                    m = m.mul(&simple_mats[i as usize]);
                }
                weyl_index[&m]
            })
            .collect();

        let mut root_lookup = BTreeMap::new();
        for (idx, r) in positive_roots.iter().enumerate() {
            root_lookup.insert(r.vec.0.clone(), (idx, 1i64));
            root_lookup.insert(r.vec.neg().0, (idx, -1i64));
        }

        // Highest short root per component: the short positive root whose
        // coefficient vector dominates every other short root's componentwise.
        let ncomp = comp.iter().max().unwrap() + 1;
        let mut highest_short = Vec::new();
        for c in 0..ncomp {
            let short_norm = positive_roots
                .iter()
                .filter(|r| r.component == c)
                .map(|r| r.norm2)
                .min()
                .unwrap();
            let cands: Vec<usize> = (0..positive_roots.len())
                .filter(|&i| {
                    positive_roots[i].component == c && positive_roots[i].norm2 == short_norm
                })
                .collect();
            let hi = *cands
                .iter()
                .find(|&&i| {
                    cands.iter().all(|&j| {
                        positive_roots[i]
                            .root_coeffs
                            .iter()
                            .zip(&positive_roots[j].root_coeffs)
                            .all(|(a, b)| a >= b)
                    })
                })
                .expect("highest short root exists and is unique");
            highest_short.push(hi);
        }

        let s_theta: Vec<FiniteWeylElement> = highest_short
            .iter()
            .map(|&hi| {
                let r = &positive_roots[hi];
                let mut a = Mat::identity(rank);
                for row in 0..rank {
                    for col in 0..rank {
                        a.a[row * rank + col] -= r.vec.0[row] * r.pairing[col];
                    }
                }
                weyl[weyl_index[&a]].clone()
            })
            .collect();

        let mut datum = RootDatum {
            ctype,
            lattice,
            rank,
            cartan,
            positive_roots,
            weyl,
            weyl_index,
            weyl_inverse,
            root_lookup,
            highest_short,
            s_theta,
            omega: Vec::new(),
        };
        datum.omega = datum.find_omega();
        datum
    }

    pub fn cartan_type(&self) -> RootSystemType {
        self.ctype
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    /// Rank of 𝕏 (= number of simple roots for these types).
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn positive_roots(&self) -> &[Root] {
        &self.positive_roots
    }

    pub fn simple_root(&self, i: usize) -> &Root {
        &self.positive_roots[self.simple_root_index(i)]
    }

    fn simple_root_index(&self, i: usize) -> usize {
        self.positive_roots
            .iter()
            .position(|r| {
                r.root_coeffs.iter().enumerate().all(|(j, &c)| {
                    if j == i {
                        c == 1
                    } else {
                        c == 0
                    }
                })
            })
            .expect("simple root present")
    }

    /// ⟨λ, α̌_i⟩ for a simple coroot (0-based index).
    pub fn pairing(&self, lam: &Weight, i: usize) -> Result<i64, RootDataError> {
        if i >= self.rank {
            return Err(RootDataError::BadSimpleIndex(i));
        }
        self.check_weight(lam)?;
        Ok(self.pair_root(lam, self.simple_root_index(i)))
    }

    /// ⟨λ, γ̌⟩ against the coroot of positive root number `root_index`.
    pub fn pair_root(&self, lam: &Weight, root_index: usize) -> i64 {
        self.positive_roots[root_index]
            .pairing
            .iter()
            .zip(&lam.0)
            .map(|(p, c)| p * c)
            .sum()
    }

    pub fn check_weight(&self, lam: &Weight) -> Result<(), RootDataError> {
        if lam.0.len() != self.rank {
            return Err(RootDataError::BadWeightRank {
                got: lam.0.len(),
                want: self.rank,
            });
        }
        Ok(())
    }

    /// All finite Weyl elements in length-then-lex order (identity first).
    pub fn weyl_elements(&self) -> &[FiniteWeylElement] {
        &self.weyl
    }

    pub fn weyl_identity(&self) -> &FiniteWeylElement {
        &self.weyl[0]
    }

    pub fn weyl_by_mat(&self, m: &Mat) -> &FiniteWeylElement {
        &self.weyl[self.weyl_index[m]]
    }

    /// Whether `w` is the canonical record of a Weyl element of this datum.
    pub fn weyl_contains(&self, w: &FiniteWeylElement) -> bool {
        self.weyl_index
            .get(&w.mat)
            .is_some_and(|&i| self.weyl[i].word == w.word)
    }

    pub fn weyl_mul(&self, a: &FiniteWeylElement, b: &FiniteWeylElement) -> &FiniteWeylElement {
        self.weyl_by_mat(&a.mat.mul(&b.mat))
    }

    pub fn weyl_inv(&self, a: &FiniteWeylElement) -> &FiniteWeylElement {
        &self.weyl[self.weyl_inverse[self.weyl_index[&a.mat]]]
    }

    pub fn simple_reflection(&self, i: usize) -> &FiniteWeylElement {
        let m = {
            let r = self.simple_root(i);
            let mut a = Mat::identity(self.rank);
            for row in 0..self.rank {
                for col in 0..self.rank {
                    a.a[row * self.rank + col] -= r.vec.0[row] * r.pairing[col];
                }
            }
            a
        };
        self.weyl_by_mat(&m)
    }

    /// Index of the highest short root of the given component.
    pub fn highest_short_root(&self, component: usize) -> &Root {
        &self.positive_roots[self.highest_short[component]]
    }

    /// Reflection in the highest short root of the given component.
    pub fn s_theta(&self, component: usize) -> &FiniteWeylElement {
        &self.s_theta[component]
    }

    pub fn num_components(&self) -> usize {
        self.highest_short.len()
    }

    /// The affine simple index set: `[0, 1..=n]`, plus `n+1` for A1xA1.
    pub fn affine_index_set(&self) -> Vec<usize> {
        let mut v = vec![0];
        v.extend(1..=self.rank);
        if self.num_components() == 2 {
            v.push(self.rank + 1);
        }
        v
    }

    /// The indices in the affine set that are affine nodes (not finite).
    pub fn affine_nodes(&self) -> Vec<usize> {
        if self.num_components() == 2 {
            vec![0, self.rank + 1]
        } else {
            vec![0]
        }
    }

    /// Translation part of the affine simple reflection for `index`;
    /// zero for finite indices, θ of the component for affine nodes.
    pub fn affine_simple_translation(&self, index: usize) -> Result<Weight, RootDataError> {
        match self.classify_affine_index(index)? {
            AffineIndex::Finite(_) => Ok(Weight::zero(self.rank)),
            AffineIndex::Affine(c) => Ok(self.highest_short_root(c).vec.clone()),
        }
    }

    /// Finite part of the affine simple reflection for `index`.
    pub fn affine_simple_finite(&self, index: usize) -> Result<&FiniteWeylElement, RootDataError> {
        match self.classify_affine_index(index)? {
            AffineIndex::Finite(i) => Ok(self.simple_reflection(i)),
            AffineIndex::Affine(c) => Ok(self.s_theta(c)),
        }
    }

    pub fn classify_affine_index(&self, index: usize) -> Result<AffineIndex, RootDataError> {
        if index == 0 {
            Ok(AffineIndex::Affine(0))
        } else if index <= self.rank {
            Ok(AffineIndex::Finite(index - 1))
        } else if index == self.rank + 1 && self.num_components() == 2 {
            Ok(AffineIndex::Affine(1))
        } else {
            Err(RootDataError::BadAffineIndex(index))
        }
    }

    /// Iwahori–Matsumoto length of t_λ·w in the extended affine Weyl group.
    ///
    /// l = Σ_{γ>0, w⁻¹γ>0} |⟨λ,γ̌⟩| + Σ_{γ>0, w⁻¹γ<0} |⟨λ,γ̌⟩ − 1|.
    /// Verified against breadth-first search over the affine generators in
    /// the test suite; length-zero elements form Ω.
    pub fn affine_length(&self, lam: &Weight, w: &FiniteWeylElement) -> u64 {
        let winv = self.weyl_inv(w);
        let mut total: u64 = 0;
        for (idx, gamma) in self.positive_roots.iter().enumerate() {
            let image = winv.mat.apply(&gamma.vec.0);
            let (_, sign) = self.root_lookup[&image];
            let k = self.pair_root(lam, idx);
            total += if sign > 0 {
                k.unsigned_abs()
            } else {
                (k - 1).unsigned_abs()
            };
        }
        total
    }

    /// Minimal affine length over the coset t_λ·W_fin; the length of the
    /// minimal coset representative x_λ.
    pub fn coset_length(&self, lam: &Weight) -> u64 {
        self.weyl
            .iter()
            .map(|w| self.affine_length(lam, w))
            .min()
            .unwrap()
    }

    /// The finite part w such that t_λ·w is the minimal element of t_λ·W_fin;
    /// unique, but we fix the BFS-least witness anyway.
    pub fn coset_min_rep(&self, lam: &Weight) -> &FiniteWeylElement {
        let target = self.coset_length(lam);
        self.weyl
            .iter()
            .find(|w| self.affine_length(lam, w) == target)
            .unwrap()
    }

    /// Length-zero elements of the extended group, identity first.
    pub fn omega_elements(&self) -> &[OmegaElement] {
        &self.omega
    }

    fn find_omega(&self) -> Vec<OmegaElement> {
        let mut found: Vec<(Weight, usize)> = Vec::new();
        let ball = 3i64;
        let mut coords = vec![-ball; self.rank];
        loop {
            let lam = Weight(coords.clone());
            for (wi, w) in self.weyl.iter().enumerate() {
                if self.affine_length(&lam, w) == 0 {
                    found.push((lam.clone(), wi));
                }
            }
            // Odometer over the coordinate ball.
            let mut i = 0;
            loop {
                if i == self.rank {
                    coords.clear();
                    break;
                }
                coords[i] += 1;
                if coords[i] <= ball {
                    break;
                }
                coords[i] = -ball;
                i += 1;
            }
            if coords.is_empty() {
                break;
            }
        }
        found.sort_by_key(|(lam, wi)| (lam.0.iter().map(|c| c.abs()).sum::<i64>(), lam.0.clone(), *wi));
        // Identity is the unique ω with zero translation.
        debug_assert!(found[0].0.is_zero() && found[0].1 == 0);

        found
            .into_iter()
            .map(|(lam, wi)| {
                let finite = self.weyl[wi].clone();
                let perm = self.omega_permutation(&lam, &finite);
                OmegaElement {
                    translation: lam,
                    finite,
                    perm,
                }
            })
            .collect()
    }

    /// Conjugation action of ω on the affine simple reflections, as a
    /// permutation of the affine index set.
    fn omega_permutation(
        &self,
        mu: &Weight,
        w: &FiniteWeylElement,
    ) -> BTreeMap<usize, usize> {
        let winv = self.weyl_inv(w).clone();
        // (t_μ w)(t_ν v)(t_μ w)⁻¹ with (t_μ w)⁻¹ = t_{−w⁻¹μ} w⁻¹.
        let mut perm = BTreeMap::new();
        for idx in self.affine_index_set() {
            let nu = self.affine_simple_translation(idx).unwrap();
            let v = self.affine_simple_finite(idx).unwrap().clone();
            let t1 = mu.add(&Weight(w.mat.apply(&nu.0)));
            let m1 = w.mat.mul(&v.mat);
            let inv_tr = Weight(winv.mat.apply(&mu.0)).neg();
            let tr = t1.add(&Weight(m1.apply(&inv_tr.0)));
            let fin = m1.mul(&winv.mat);
            let target = self
                .affine_index_set()
                .into_iter()
                .find(|&j| {
                    self.affine_simple_translation(j).unwrap() == tr
                        && self.affine_simple_finite(j).unwrap().mat == fin
                })
                .expect("omega conjugation permutes the affine simple reflections");
            perm.insert(idx, target);
        }
        perm
    }

    /// Minimal-length w with w·λ dominant; ties broken by BFS (lex) order.
    pub fn dominant_representative(&self, lam: &Weight) -> (Weight, &FiniteWeylElement) {
        for w in &self.weyl {
            let img = Weight(w.mat.apply(&lam.0));
            if self.is_dominant(&img) {
                return (img, w);
            }
        }
        unreachable!("every orbit meets the dominant cone")
    }

    pub fn is_dominant(&self, lam: &Weight) -> bool {
        (0..self.rank).all(|i| self.pairing(lam, i).unwrap() >= 0)
    }

    /// Rational coordinates of λ over the simple roots: solves C·x = coords
    /// (weight mode) or returns coords directly (root mode). Result as
    /// (numerators, denominator).
    pub fn root_coordinates(&self, lam: &Weight) -> (Vec<i64>, i64) {
        match self.lattice {
            Lattice::Root => (lam.0.clone(), 1),
            Lattice::Weight => {
                let n = self.rank;
                let det = match n {
                    1 => self.cartan[0][0],
                    2 => self.cartan[0][0] * self.cartan[1][1] - self.cartan[0][1] * self.cartan[1][0],
                    _ => unreachable!(),
                };
                let adj_apply = |v: &[i64]| -> Vec<i64> {
                    match n {
                        1 => vec![v[0]],
                        2 => vec![
                            self.cartan[1][1] * v[0] - self.cartan[0][1] * v[1],
                            -self.cartan[1][0] * v[0] + self.cartan[0][0] * v[1],
                        ],
                        _ => unreachable!(),
                    }
                };
                (adj_apply(&lam.0), det)
            }
        }
    }

    /// Is μ − λ a nonnegative integer combination of simple roots?
    pub fn dominance_leq(&self, lam: &Weight, mu: &Weight) -> bool {
        let diff = mu.sub(lam);
        let (num, det) = self.root_coordinates(&diff);
        num.iter().all(|&c| c % det == 0 && c / det >= 0)
    }

    /// Index of the Ω-coset of λ in 𝕏/ℤΦ (0 = root-lattice coset).
    pub fn omega_component(&self, lam: &Weight) -> usize {
        for (i, om) in self.omega.iter().enumerate() {
            let diff = lam.sub(&om.translation);
            let (num, det) = self.root_coordinates(&diff);
            if num.iter().all(|&c| c % det == 0) {
                return i;
            }
        }
        unreachable!("Ω covers 𝕏/ℤΦ")
    }

    /// Comparison in the partial order on 𝕏: λ ≤ ν iff the dominant
    /// representatives are comparable in dominance order. Distinct weights
    /// with equal representatives are incomparable.
    pub fn order_on_x(&self, lam: &Weight, nu: &Weight) -> XOrder {
        if lam == nu {
            return XOrder::Eq;
        }
        let (lp, _) = self.dominant_representative(lam);
        let (np, _) = self.dominant_representative(nu);
        if lp == np {
            return XOrder::Incomparable;
        }
        if self.dominance_leq(&lp, &np) {
            XOrder::Lt
        } else if self.dominance_leq(&np, &lp) {
            XOrder::Gt
        } else {
            XOrder::Incomparable
        }
    }

    /// Deterministic total order on 𝕏 used wherever a processing sequence is
    /// needed (filtration candidates, printing): minimal-coset-representative
    /// length, then Ω-component, then lex on coordinates.
    ///
    /// This order agrees with [`Self::order_on_x`] on every reflection orbit
    /// {λ, s·λ} and its per-component minima are the Ω-representatives, but
    /// it is not a linear extension of the dominance order across orbits:
    /// coset length is a property of λ itself, dominance one of its orbit.
    pub fn total_key(&self, lam: &Weight) -> (u64, usize, Vec<i64>) {
        (
            self.coset_length(lam),
            self.omega_component(lam),
            lam.0.clone(),
        )
    }
}

/// Classification of an index in the affine simple index set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AffineIndex {
    /// Finite simple reflection (internal 0-based index).
    Finite(usize),
    /// Affine node of the given component.
    Affine(usize),
}


/// Result of comparing two weights in the partial order on 𝕏.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum XOrder {
    Lt,
    Gt,
    Eq,
    Incomparable,
}
