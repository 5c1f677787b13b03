//! Generalized Cartan data `(I, ·, φ1, φ2)`, their edge contraction,
//! simply connected root data, and Weyl group reflections on `Y = Z[I]`.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A generalized Cartan datum. `phi1` counts vertices per orbit, `phi2` loops per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CartanJson", into = "CartanJson")]
pub struct CartanDatum {
    labels: Vec<String>,
    form: Vec<Vec<i64>>,
    phi1: Vec<u64>,
    phi2: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct CartanJson {
    labels: Vec<String>,
    form: Vec<Vec<i64>>,
    phi1: BTreeMap<String, u64>,
    phi2: BTreeMap<String, u64>,
}

impl TryFrom<CartanJson> for CartanDatum {
    type Error = Error;

    fn try_from(raw: CartanJson) -> Result<Self> {
        let lookup = |map: &BTreeMap<String, u64>, name: &str| -> Result<Vec<u64>> {
            if map.len() != raw.labels.len() {
                return Err(Error::InvalidDatum(format!(
                    "{name} has {} entries for {} labels",
                    map.len(),
                    raw.labels.len()
                )));
            }
            raw.labels
                .iter()
                .map(|l| map.get(l).copied().ok_or_else(|| Error::UnknownLabel(l.clone())))
                .collect()
        };
        let phi1 = lookup(&raw.phi1, "phi1")?;
        let phi2 = lookup(&raw.phi2, "phi2")?;
        CartanDatum::new(raw.labels, raw.form, phi1, phi2)
    }
}

impl From<CartanDatum> for CartanJson {
    fn from(d: CartanDatum) -> Self {
        let zip = |v: &[u64]| d.labels.iter().cloned().zip(v.iter().copied()).collect();
        CartanJson {
            phi1: zip(&d.phi1),
            phi2: zip(&d.phi2),
            labels: d.labels,
            form: d.form,
        }
    }
}

/// A violated condition of a candidate Cartan datum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CartanViolation {
    ZeroPhi1 {
        label: String,
    },
    Asymmetric {
        i: String,
        j: String,
    },
    Diagonal {
        label: String,
        expected: i64,
        found: i64,
    },
    PositiveOffDiagonal {
        i: String,
        j: String,
        value: i64,
    },
    NotDivisible {
        i: String,
        j: String,
        value: i64,
        phi1: u64,
    },
}

impl fmt::Display for CartanViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CartanViolation::ZeroPhi1 { label } => write!(f, "phi1({label}) must be positive"),
            CartanViolation::Asymmetric { i, j } => write!(f, "form is not symmetric at ({i}, {j})"),
            CartanViolation::Diagonal { label, expected, found } => write!(
                f,
                "{label}·{label} = {found}, expected 2(phi1 - phi1*phi2) = {expected}"
            ),
            CartanViolation::PositiveOffDiagonal { i, j, value } => {
                write!(f, "{i}·{j} = {value} is positive")
            }
            CartanViolation::NotDivisible { i, j, value, phi1 } => {
                write!(f, "phi1({i}) = {phi1} does not divide {i}·{j} = {value}")
            }
        }
    }
}

/// The pair `(i₊, i₋)` to be merged into `i₀ = i₊ + i₋`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ContractionPair {
    pub plus: String,
    pub minus: String,
}

impl ContractionPair {
    pub fn new(plus: impl Into<String>, minus: impl Into<String>) -> Self {
        ContractionPair {
            plus: plus.into(),
            minus: minus.into(),
        }
    }

    /// Name of the merged label.
    pub fn merged_label(&self) -> String {
        format!("{}+{}", self.plus, self.minus)
    }
}

impl CartanDatum {
    /// Builds a candidate datum. Only shapes and label uniqueness are checked;
    /// use [`validate_cartan`] for the datum conditions.
    pub fn new(labels: Vec<String>, form: Vec<Vec<i64>>, phi1: Vec<u64>, phi2: Vec<u64>) -> Result<Self> {
        let n = labels.len();
        if form.len() != n || form.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidDatum(format!("form must be {n}x{n}")));
        }
        if phi1.len() != n || phi2.len() != n {
            return Err(Error::InvalidDatum("phi maps must cover every label".into()));
        }
        let unique: HashSet<&String> = labels.iter().collect();
        if unique.len() != n {
            return Err(Error::InvalidDatum("labels must be distinct".into()));
        }
        Ok(CartanDatum {
            labels,
            form,
            phi1,
            phi2,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn form(&self) -> &[Vec<i64>] {
        &self.form
    }

    pub fn phi1(&self) -> &[u64] {
        &self.phi1
    }

    pub fn phi2(&self) -> &[u64] {
        &self.phi2
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn dot(&self, i: &str, j: &str) -> Result<i64> {
        Ok(self.form[self.index_of(i)?][self.index_of(j)?])
    }

    /// The symmetric form evaluated on two elements of `Z[I]` given as coefficient vectors.
    pub fn dot_vec(&self, x: &[i64], y: &[i64]) -> i64 {
        let mut s = 0;
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                s += xi * yj * self.form[i][j];
            }
        }
        s
    }

    pub fn is_valid(&self) -> bool {
        validate_cartan(self).is_empty()
    }
}

/// Checks both datum conditions for every label and pair; returns every violation found.
pub fn validate_cartan(d: &CartanDatum) -> Vec<CartanViolation> {
    let mut out = Vec::new();
    let n = d.rank();
    for i in 0..n {
        let li = &d.labels[i];
        if d.phi1[i] == 0 {
            out.push(CartanViolation::ZeroPhi1 { label: li.clone() });
        }
        let p1 = d.phi1[i] as i64;
        let expected = 2 * (p1 - p1 * d.phi2[i] as i64);
        if d.form[i][i] != expected {
            out.push(CartanViolation::Diagonal {
                label: li.clone(),
                expected,
                found: d.form[i][i],
            });
        }
        for j in 0..n {
            if i == j {
                continue;
            }
            let lj = &d.labels[j];
            let v = d.form[i][j];
            if i < j && v != d.form[j][i] {
                out.push(CartanViolation::Asymmetric {
                    i: li.clone(),
                    j: lj.clone(),
                });
            }
            if v > 0 && i < j {
                out.push(CartanViolation::PositiveOffDiagonal {
                    i: li.clone(),
                    j: lj.clone(),
                    value: v,
                });
            }
            if d.phi1[i] != 0 && v % p1 != 0 {
                out.push(CartanViolation::NotDivisible {
                    i: li.clone(),
                    j: lj.clone(),
                    value: v,
                    phi1: d.phi1[i],
                });
            }
        }
    }
    out
}

fn check_pair(d: &CartanDatum, pair: &ContractionPair) -> Result<(usize, usize)> {
    let p = d.index_of(&pair.plus)?;
    let m = d.index_of(&pair.minus)?;
    if p == m {
        return Err(Error::InvalidPair("plus and minus must differ".into()));
    }
    if d.phi1[p] != d.phi1[m] {
        return Err(Error::InvalidPair(format!(
            "phi1({}) = {} differs from phi1({}) = {}",
            pair.plus, d.phi1[p], pair.minus, d.phi1[m]
        )));
    }
    if d.phi2[p] != 0 || d.phi2[m] != 0 {
        return Err(Error::InvalidPair("phi2 must vanish on both labels".into()));
    }
    if d.form[p][m] == 0 {
        return Err(Error::InvalidPair(format!("{}·{} = 0", pair.plus, pair.minus)));
    }
    Ok((p, m))
}

fn require_valid(d: &CartanDatum) -> Result<()> {
    let v = validate_cartan(d);
    if let Some(first) = v.first() {
        return Err(Error::InvalidDatum(first.to_string()));
    }
    Ok(())
}

/// Loop count of the merged label: `-(i₊·i₋)/φ1(i₊) - 1`.
pub fn merged_phi2(d: &CartanDatum, pair: &ContractionPair) -> Result<u64> {
    let (p, m) = check_pair(d, pair)?;
    Ok((-d.form[p][m] / d.phi1[p] as i64 - 1) as u64)
}

/// Edge contraction of a Cartan datum along `pair`. The merged label takes the
/// position of `i₊`; every other label keeps its relative order.
pub fn contract_cartan(d: &CartanDatum, pair: &ContractionPair) -> Result<CartanDatum> {
    require_valid(d)?;
    let (p, m) = check_pair(d, pair)?;
    // coefficient vectors in Z[I] of the new labels
    let basis: Vec<Vec<i64>> = (0..d.rank())
        .filter(|&i| i != m)
        .map(|i| {
            let mut v = vec![0; d.rank()];
            v[i] = 1;
            if i == p {
                v[m] = 1;
            }
            v
        })
        .collect();
    let old: Vec<usize> = (0..d.rank()).filter(|&i| i != m).collect();
    let labels = old
        .iter()
        .map(|&i| {
            if i == p {
                pair.merged_label()
            } else {
                d.labels[i].clone()
            }
        })
        .collect();
    let form = basis
        .iter()
        .map(|x| basis.iter().map(|y| d.dot_vec(x, y)).collect())
        .collect();
    let phi2_new = merged_phi2(d, pair)?;
    let phi1 = old.iter().map(|&i| d.phi1[i]).collect();
    let phi2 = old.iter().map(|&i| if i == p { phi2_new } else { d.phi2[i] }).collect();
    CartanDatum::new(labels, form, phi1, phi2)
}

/// Searches for a label bijection `σ: d1 → d2` preserving the form, `φ1` and `φ2`.
/// The result maps each label of `d1` (in order) to a label of `d2`.
pub fn is_isomorphic(d1: &CartanDatum, d2: &CartanDatum) -> Option<Vec<(String, String)>> {
    if d1.rank() != d2.rank() {
        return None;
    }
    let n = d1.rank();
    let sig = |d: &CartanDatum, i: usize| (d.phi1[i], d.phi2[i], d.form[i][i]);
    let mut assign: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];

    fn search(
        d1: &CartanDatum,
        d2: &CartanDatum,
        sig: &dyn Fn(&CartanDatum, usize) -> (u64, u64, i64),
        assign: &mut Vec<usize>,
        used: &mut [bool],
    ) -> bool {
        let i = assign.len();
        if i == d1.rank() {
            return true;
        }
        for j in 0..d2.rank() {
            if used[j] || sig(d1, i) != sig(d2, j) {
                continue;
            }
            if assign
                .iter()
                .enumerate()
                .any(|(k, &sk)| d1.form[i][k] != d2.form[j][sk])
            {
                continue;
            }
            used[j] = true;
            assign.push(j);
            if search(d1, d2, sig, assign, used) {
                return true;
            }
            assign.pop();
            used[j] = false;
        }
        false
    }

    if search(d1, d2, &sig, &mut assign, &mut used) {
        Some(
            assign
                .iter()
                .enumerate()
                .map(|(i, &j)| (d1.labels[i].clone(), d2.labels[j].clone()))
                .collect(),
        )
    } else {
        None
    }
}

/// Integer matrix acting on `Y` (column vectors).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeylElement {
    pub matrix: Vec<Vec<i64>>,
}

impl WeylElement {
    pub fn identity(n: usize) -> Self {
        let matrix = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        WeylElement { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn compose(&self, rhs: &WeylElement) -> WeylElement {
        let n = self.dim();
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| self.matrix[i][k] * rhs.matrix[k][j]).sum())
                    .collect()
            })
            .collect();
        WeylElement { matrix }
    }

    pub fn apply(&self, y: &[i64]) -> Vec<i64> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(y).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == WeylElement::identity(self.dim())
    }

    /// Determinant by fraction-free elimination.
    pub fn determinant(&self) -> i64 {
        determinant(&self.matrix)
    }
}

fn determinant(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(swap) = (k + 1..n).find(|&r| a[r][k] != 0) else {
                return 0;
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    (sign * a[n - 1][n - 1]) as i64
}

/// A root datum `(Y, X, <,>, I → Y, I → X)` with explicit coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootDatum {
    pub labels: Vec<String>,
    pub rank_y: usize,
    pub rank_x: usize,
    /// Perfect pairing in the chosen bases of `Y` (rows) and `X` (columns).
    pub pairing: Vec<Vec<i64>>,
    /// `i ↦ i` in coordinates of `Y`, one row per label.
    pub embed_y: Vec<Vec<i64>>,
    /// `i ↦ i'` in coordinates of `X`, one row per label.
    pub embed_x: Vec<Vec<i64>>,
}

impl RootDatum {
    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// `<y, x>` for coordinate vectors.
    pub fn pair(&self, y: &[i64], x: &[i64]) -> i64 {
        let mut s = 0;
        for (r, yr) in y.iter().enumerate() {
            for (c, xc) in x.iter().enumerate() {
                s += yr * self.pairing[r][c] * xc;
            }
        }
        s
    }

    /// Matrix of `<i, j'>` over the embedded labels.
    pub fn simple_pairing_matrix(&self) -> Vec<Vec<i64>> {
        self.embed_y
            .iter()
            .map(|y| self.embed_x.iter().map(|x| self.pair(y, x)).collect())
            .collect()
    }

    pub fn is_perfect(&self) -> bool {
        self.rank_x == self.rank_y && determinant(&self.pairing).abs() == 1
    }

    /// Checks perfectness and `<i, j'> = i·j / φ1(i)` against `datum`.
    pub fn satisfies_axioms(&self, datum: &CartanDatum) -> bool {
        if datum.labels() != self.labels.as_slice() || !self.is_perfect() {
            return false;
        }
        let m = self.simple_pairing_matrix();
        (0..datum.rank()).all(|i| (0..datum.rank()).all(|j| m[i][j] * datum.phi1()[i] as i64 == datum.form()[i][j]))
    }
}

/// Simply connected root datum: `Y = Z[I]`, `X` its dual, canonical pairing.
pub fn build_simply_connected_root_datum(d: &CartanDatum) -> Result<RootDatum> {
    require_valid(d)?;
    let n = d.rank();
    let unit = |i: usize| (0..n).map(|k| i64::from(k == i)).collect::<Vec<_>>();
    let embed_x = (0..n)
        .map(|j| (0..n).map(|i| d.form[i][j] / d.phi1[i] as i64).collect())
        .collect();
    Ok(RootDatum {
        labels: d.labels.clone(),
        rank_y: n,
        rank_x: n,
        pairing: (0..n).map(unit).collect(),
        embed_y: (0..n).map(unit).collect(),
        embed_x,
    })
}

/// Restricts the embeddings of `rd` to the contracted label set, sending the
/// merged label to `i₊ + i₋` in `Y` and `i₊' + i₋'` in `X`.
pub fn contract_root_datum(rd: &RootDatum, pair: &ContractionPair) -> Result<RootDatum> {
    let p = rd.index_of(&pair.plus)?;
    let m = rd.index_of(&pair.minus)?;
    if p == m {
        return Err(Error::InvalidPair("plus and minus must differ".into()));
    }
    let add = |a: &[i64], b: &[i64]| a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<_>>();
    let keep: Vec<usize> = (0..rd.labels.len()).filter(|&i| i != m).collect();
    let pick = |emb: &[Vec<i64>]| -> Vec<Vec<i64>> {
        keep.iter()
            .map(|&i| if i == p { add(&emb[p], &emb[m]) } else { emb[i].clone() })
            .collect()
    };
    Ok(RootDatum {
        labels: keep
            .iter()
            .map(|&i| {
                if i == p {
                    pair.merged_label()
                } else {
                    rd.labels[i].clone()
                }
            })
            .collect(),
        rank_y: rd.rank_y,
        rank_x: rd.rank_x,
        pairing: rd.pairing.clone(),
        embed_y: pick(&rd.embed_y),
        embed_x: pick(&rd.embed_x),
    })
}

/// `y ↦ y - <y, Σ c_i i'> Σ c_i i` on `Y`.
pub fn generalized_reflection(rd: &RootDatum, coeffs: &BTreeMap<String, i64>) -> Result<WeylElement> {
    let mut vy = vec![0i64; rd.rank_y];
    let mut vx = vec![0i64; rd.rank_x];
    for (label, &c) in coeffs {
        let i = rd.index_of(label)?;
        for (a, b) in vy.iter_mut().zip(&rd.embed_y[i]) {
            *a += c * b;
        }
        for (a, b) in vx.iter_mut().zip(&rd.embed_x[i]) {
            *a += c * b;
        }
    }
    let n = rd.rank_y;
    let mut w = WeylElement::identity(n);
    for k in 0..n {
        let mut ek = vec![0; n];
        ek[k] = 1;
        let t = rd.pair(&ek, &vx);
        for (row, y) in w.matrix.iter_mut().zip(&vy) {
            row[k] -= t * y;
        }
    }
    Ok(w)
}

/// Simple reflection `s_i(y) = y - <y, i'> i`.
pub fn reflection(rd: &RootDatum, label: &str) -> Result<WeylElement> {
    let mut c = BTreeMap::new();
    c.insert(label.to_string(), 1);
    generalized_reflection(rd, &c)
}

/// Outcome of the conjugation identity `s_{i₀} = s_{i₊} s_{i₋ + φ̂2 i₊} s_{i₊}` on `Z[I]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PsiCheck {
    pub holds: bool,
    /// `s_{i₀}` computed from the contracted root datum.
    pub lhs: WeylElement,
    /// The conjugated generalized reflection.
    pub rhs: WeylElement,
    pub merged_phi2: u64,
}

pub fn check_psi_identity(d: &CartanDatum, pair: &ContractionPair) -> Result<PsiCheck> {
    let rd = build_simply_connected_root_datum(d)?;
    let phi2 = merged_phi2(d, pair)?;
    let contracted = contract_root_datum(&rd, pair)?;
    let lhs = reflection(&contracted, &pair.merged_label())?;
    let s_plus = reflection(&rd, &pair.plus)?;
    let mut coeffs = BTreeMap::new();
    coeffs.insert(pair.minus.clone(), 1);
    coeffs.insert(pair.plus.clone(), phi2 as i64);
    let middle = generalized_reflection(&rd, &coeffs)?;
    let rhs = s_plus.compose(&middle).compose(&s_plus);
    Ok(PsiCheck {
        holds: lhs == rhs,
        lhs,
        rhs,
        merged_phi2: phi2,
    })
}

/// Breadth-first search for a word in the simple reflections equal to `target`.
/// `None` only means no word of length `<= max_depth` exists.
pub fn weyl_word_search(d: &CartanDatum, target: &WeylElement, max_depth: usize) -> Result<Option<Vec<String>>> {
    let rd = build_simply_connected_root_datum(d)?;
    if target.dim() != rd.rank_y {
        return Err(Error::Shape(format!(
            "target acts on rank {}, datum has rank {}",
            target.dim(),
            rd.rank_y
        )));
    }
    let gens: Vec<WeylElement> = d.labels().iter().map(|l| reflection(&rd, l)).collect::<Result<_>>()?;
    let start = WeylElement::identity(rd.rank_y);
    let mut seen: HashSet<WeylElement> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back((start, Vec::<usize>::new()));
    while let Some((w, word)) = queue.pop_front() {
        if &w == target {
            return Ok(Some(word.iter().map(|&i| d.labels()[i].clone()).collect()));
        }
        if word.len() == max_depth {
            continue;
        }
        for (i, g) in gens.iter().enumerate() {
            let next = w.compose(g);
            if seen.insert(next.clone()) {
                let mut nw = word.clone();
                nw.push(i);
                queue.push_back((next, nw));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    pub(crate) fn example_abc() -> CartanDatum {
        CartanDatum::new(
            labels(&["a", "b", "c"]),
            vec![vec![-4, -6, 0], vec![-6, 0, -3], vec![0, -3, -4]],
            vec![2, 3, 1],
            vec![2, 1, 3],
        )
        .unwrap()
    }

    fn kronecker() -> CartanDatum {
        CartanDatum::new(
            labels(&["p", "m"]),
            vec![vec![2, -2], vec![-2, 2]],
            vec![1, 1],
            vec![0, 0],
        )
        .unwrap()
    }

    fn doubled_kronecker() -> CartanDatum {
        CartanDatum::new(
            labels(&["p", "m"]),
            vec![vec![4, -6], vec![-6, 4]],
            vec![2, 2],
            vec![0, 0],
        )
        .unwrap()
    }

    #[test]
    fn example_datum_is_valid() {
        assert!(validate_cartan(&example_abc()).is_empty());
    }

    #[test]
    fn rank_one_is_valid() {
        let d = CartanDatum::new(labels(&["i"]), vec![vec![2]], vec![1], vec![0]).unwrap();
        assert!(d.is_valid());
    }

    #[test]
    fn divisibility_violation() {
        let d = CartanDatum::new(
            labels(&["x", "y"]),
            vec![vec![4, -5], vec![-5, 6]],
            vec![2, 3],
            vec![0, 0],
        )
        .unwrap();
        let v = validate_cartan(&d);
        assert!(v.contains(&CartanViolation::NotDivisible {
            i: "x".into(),
            j: "y".into(),
            value: -5,
            phi1: 2
        }));
    }

    #[test]
    fn json_shape() {
        let d = example_abc();
        let s = serde_json::to_value(&d).unwrap();
        assert_eq!(s["phi1"]["b"], 3);
        let back: CartanDatum = serde_json::from_value(s).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn kronecker_contraction() {
        let c = contract_cartan(&kronecker(), &ContractionPair::new("p", "m")).unwrap();
        assert_eq!(c.labels(), &["p+m".to_string()]);
        assert_eq!(c.form(), &[vec![0]]);
        assert_eq!(c.phi2(), &[1]);
        assert!(c.is_valid());
    }

    #[test]
    fn doubled_contraction_creates_two_loops() {
        let c = contract_cartan(&doubled_kronecker(), &ContractionPair::new("p", "m")).unwrap();
        assert_eq!(c.phi1(), &[2]);
        assert_eq!(c.phi2(), &[2]);
        assert!(c.is_valid());
    }

    #[test]
    fn single_edge_contraction_has_no_loops() {
        let a2 = CartanDatum::new(
            labels(&["p", "m"]),
            vec![vec![2, -1], vec![-1, 2]],
            vec![1, 1],
            vec![0, 0],
        )
        .unwrap();
        let c = contract_cartan(&a2, &ContractionPair::new("p", "m")).unwrap();
        assert_eq!(c.phi2(), &[0]);
        assert_eq!(c.form(), &[vec![2]]);
    }

    #[test]
    fn bad_pairs_are_rejected() {
        let d = example_abc();
        assert!(contract_cartan(&d, &ContractionPair::new("a", "b")).is_err());
        assert!(contract_cartan(&kronecker(), &ContractionPair::new("p", "p")).is_err());
        assert!(contract_cartan(&kronecker(), &ContractionPair::new("p", "z")).is_err());
    }

    #[test]
    fn isomorphism_examples() {
        let d = example_abc();
        let id = is_isomorphic(&d, &d).unwrap();
        assert!(id.iter().all(|(a, b)| a == b));

        // rename a -> z, keep everything else
        let renamed = CartanDatum::new(
            labels(&["c", "z", "b"]),
            vec![vec![-4, 0, -3], vec![0, -4, -6], vec![-3, -6, 0]],
            vec![1, 2, 3],
            vec![3, 2, 1],
        )
        .unwrap();
        let iso = is_isomorphic(&d, &renamed).unwrap();
        assert_eq!(
            iso,
            vec![
                ("a".to_string(), "z".to_string()),
                ("b".to_string(), "b".to_string()),
                ("c".to_string(), "c".to_string())
            ]
        );

        let r0 = CartanDatum::new(labels(&["i"]), vec![vec![2]], vec![1], vec![0]).unwrap();
        let r1 = CartanDatum::new(labels(&["i"]), vec![vec![0]], vec![1], vec![1]).unwrap();
        assert!(is_isomorphic(&r0, &r1).is_none());
    }

    #[test]
    fn root_datum_pairing() {
        let rd = build_simply_connected_root_datum(&example_abc()).unwrap();
        let m = rd.simple_pairing_matrix();
        assert_eq!(m[0], vec![-2, -3, 0]);
        assert_eq!(m[1][0], -2);
        assert_ne!(m[0][1], m[1][0]);
        assert!(rd.satisfies_axioms(&example_abc()));

        let a1 = CartanDatum::new(labels(&["i"]), vec![vec![2]], vec![1], vec![0]).unwrap();
        let rd1 = build_simply_connected_root_datum(&a1).unwrap();
        assert_eq!(rd1.simple_pairing_matrix(), vec![vec![2]]);
    }

    #[test]
    fn contracted_root_datum() {
        let pair = ContractionPair::new("p", "m");
        let rd = build_simply_connected_root_datum(&kronecker()).unwrap();
        let c = contract_root_datum(&rd, &pair).unwrap();
        assert_eq!(c.simple_pairing_matrix(), vec![vec![0]]);
        assert!(c.satisfies_axioms(&contract_cartan(&kronecker(), &pair).unwrap()));

        let rd2 = build_simply_connected_root_datum(&doubled_kronecker()).unwrap();
        let c2 = contract_root_datum(&rd2, &pair).unwrap();
        assert_eq!(c2.simple_pairing_matrix(), vec![vec![-2]]);
    }

    #[test]
    fn contracted_root_datum_linearity() {
        // third label j: <j, i0'> = <j, i+'> + <j, i-'>
        let d = CartanDatum::new(
            labels(&["p", "m", "j"]),
            vec![vec![2, -2, -1], vec![-2, 2, -3], vec![-1, -3, 2]],
            vec![1, 1, 1],
            vec![0, 0, 0],
        )
        .unwrap();
        let pair = ContractionPair::new("p", "m");
        let rd = build_simply_connected_root_datum(&d).unwrap();
        let c = contract_root_datum(&rd, &pair).unwrap();
        let m = c.simple_pairing_matrix();
        let full = rd.simple_pairing_matrix();
        assert_eq!(m[1][0], full[2][0] + full[2][1]);
        assert!(c.satisfies_axioms(&contract_cartan(&d, &pair).unwrap()));
    }

    #[test]
    fn reflections() {
        let a1 = CartanDatum::new(labels(&["i"]), vec![vec![2]], vec![1], vec![0]).unwrap();
        let rd1 = build_simply_connected_root_datum(&a1).unwrap();
        assert_eq!(reflection(&rd1, "i").unwrap().matrix, vec![vec![-1]]);

        let rd = build_simply_connected_root_datum(&kronecker()).unwrap();
        let sp = reflection(&rd, "p").unwrap();
        assert_eq!(sp.apply(&[0, 1]), vec![2, 1]);

        let rd = build_simply_connected_root_datum(&example_abc()).unwrap();
        let m = rd.simple_pairing_matrix();
        for (i, l) in ["a", "b", "c"].iter().enumerate() {
            let s = reflection(&rd, l).unwrap();
            let mut e = vec![0; 3];
            e[i] = 1;
            let image = s.apply(&e);
            assert_eq!(image[i], 1 - m[i][i]);
            assert_eq!(s.determinant(), 1 - m[i][i]);
        }
        let rdk = build_simply_connected_root_datum(&kronecker()).unwrap();
        for l in ["p", "m"] {
            let s = reflection(&rdk, l).unwrap();
            assert!(s.compose(&s).is_identity());
            assert_eq!(s.determinant(), -1);
        }
    }

    #[test]
    fn generalized_reflections() {
        let rd = build_simply_connected_root_datum(&example_abc()).unwrap();
        let mut single = BTreeMap::new();
        single.insert("b".to_string(), 1);
        assert_eq!(
            generalized_reflection(&rd, &single).unwrap(),
            reflection(&rd, "b").unwrap()
        );

        let rd2 = build_simply_connected_root_datum(&doubled_kronecker()).unwrap();
        let mut c = BTreeMap::new();
        c.insert("m".to_string(), 1);
        c.insert("p".to_string(), 2);
        let s = generalized_reflection(&rd2, &c).unwrap();
        assert_eq!(s.apply(&[1, 0]), vec![-1, -1]);

        let rdk = build_simply_connected_root_datum(&kronecker()).unwrap();
        let mut c = BTreeMap::new();
        c.insert("m".to_string(), 1);
        c.insert("p".to_string(), 1);
        let s = generalized_reflection(&rdk, &c).unwrap();
        assert_eq!(s.apply(&[1, 0]), vec![1, 0]);
    }

    #[test]
    fn psi_identity_examples() {
        let pair = ContractionPair::new("p", "m");
        let k = check_psi_identity(&kronecker(), &pair).unwrap();
        assert!(k.holds);
        assert_eq!(k.lhs.apply(&[1, 0]), vec![1, 0]);
        let dk = check_psi_identity(&doubled_kronecker(), &pair).unwrap();
        assert!(dk.holds);
        assert_eq!(dk.merged_phi2, 2);

        let a2 = CartanDatum::new(
            labels(&["p", "m"]),
            vec![vec![2, -1], vec![-1, 2]],
            vec![1, 1],
            vec![0, 0],
        )
        .unwrap();
        let r = check_psi_identity(&a2, &pair).unwrap();
        assert!(r.holds);
        assert_eq!(r.merged_phi2, 0);
        // classical braid conjugation s_{i0} = s_+ s_- s_+
        let rd = build_simply_connected_root_datum(&a2).unwrap();
        let sp = reflection(&rd, "p").unwrap();
        let sm = reflection(&rd, "m").unwrap();
        assert_eq!(r.lhs, sp.compose(&sm).compose(&sp));
    }

    #[test]
    fn word_search() {
        let d = doubled_kronecker();
        let rd = build_simply_connected_root_datum(&d).unwrap();
        let sp = reflection(&rd, "p").unwrap();
        assert_eq!(weyl_word_search(&d, &sp, 3).unwrap(), Some(vec!["p".to_string()]));
        assert_eq!(
            weyl_word_search(&d, &WeylElement::identity(2), 0).unwrap(),
            Some(vec![])
        );
        let mut c = BTreeMap::new();
        c.insert("m".to_string(), 1);
        c.insert("p".to_string(), 2);
        let target = generalized_reflection(&rd, &c).unwrap();
        assert_eq!(weyl_word_search(&d, &target, 8).unwrap(), None);
    }
}
