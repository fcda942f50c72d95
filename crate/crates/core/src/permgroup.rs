//! Finite permutation groups: closure of generators into a sorted element
//! list, and exhaustive subgroup-lattice enumeration for small orders.
//!
//! Points are labelled `1..=degree` in text and stored 0-based. A product
//! `p * q` means "apply `p`, then `q`".

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const DEFAULT_ORDER_LIMIT: usize = 10_000;
pub const DEFAULT_LATTICE_LIMIT: usize = 100_000;

/// Groups up to this order get a precomputed Cayley table.
const TABLE_ORDER_LIMIT: usize = 2048;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("group order exceeds the order limit {limit}")]
    OrderLimit { limit: usize },
    #[error("subgroup count exceeds the lattice limit {limit}")]
    LatticeLimit { limit: usize },
    #[error("cannot parse permutation {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error("not a permutation of 1..={degree}: {detail}")]
    BadPermutation { degree: usize, detail: String },
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("subgroup is not in the lattice")]
    NotInLattice,
}

/// A permutation stored as its image array.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm(Vec<u16>);

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm((0..degree as u16).collect())
    }

    /// From 0-based images; checks bijectivity.
    pub fn from_images(images: Vec<u16>) -> Result<Perm, GroupError> {
        let degree = images.len();
        let mut seen = vec![false; degree];
        for &x in &images {
            let x = x as usize;
            if x >= degree || seen[x] {
                return Err(GroupError::BadPermutation {
                    degree,
                    detail: format!("{images:?}"),
                });
            }
            seen[x] = true;
        }
        Ok(Perm(images))
    }

    /// From 1-based cycles, e.g. `[[1, 2, 3], [4, 5]]`.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Perm, GroupError> {
        let mut images: Vec<u16> = (0..degree as u16).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (i, &point) in cycle.iter().enumerate() {
                if point == 0 || point > degree || touched[point - 1] {
                    return Err(GroupError::BadPermutation {
                        degree,
                        detail: format!("cycles {cycles:?}"),
                    });
                }
                touched[point - 1] = true;
                let next = cycle[(i + 1) % cycle.len()];
                if next == 0 || next > degree {
                    return Err(GroupError::BadPermutation {
                        degree,
                        detail: format!("cycles {cycles:?}"),
                    });
                }
                images[point - 1] = (next - 1) as u16;
            }
        }
        Perm::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u16] {
        &self.0
    }

    pub fn apply(&self, point: usize) -> usize {
        self.0[point] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// `self` then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u16; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u16;
        }
        Perm(inv)
    }

    /// Extends to a larger degree by fixing the new points.
    pub fn extend(&self, degree: usize) -> Perm {
        let mut images = self.0.clone();
        images.extend(self.0.len() as u16..degree as u16);
        Perm(images)
    }

    /// Moves every point up by `offset` inside a permutation of `degree`.
    pub fn shift(&self, offset: usize, degree: usize) -> Perm {
        let mut images: Vec<u16> = (0..degree as u16).collect();
        for (i, &x) in self.0.iter().enumerate() {
            images[i + offset] = x + offset as u16;
        }
        Perm(images)
    }

    /// 1-based disjoint cycles of length at least 2.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] as usize == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x + 1);
                x = self.0[x] as usize;
            }
            out.push(cycle);
        }
        out
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for cycle in cycles {
            let body: Vec<String> = cycle.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", body.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{self}")
    }
}

/// Parses cycle notation such as `(1 2 3)(4 5)`; `()` is the identity.
pub fn parse_cycles(text: &str) -> Result<Vec<Vec<usize>>, GroupError> {
    let err = |reason: &str| GroupError::Parse {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let mut cycles = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body = rest.strip_prefix('(').ok_or_else(|| err("expected '('"))?;
        let close = body.find(')').ok_or_else(|| err("missing ')'"))?;
        let points = body[..close]
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().map_err(|_| err("bad point")))
            .collect::<Result<Vec<_>, _>>()?;
        if points.contains(&0) {
            return Err(err("points are numbered from 1"));
        }
        if !points.is_empty() {
            cycles.push(points);
        }
        rest = body[close + 1..].trim_start();
    }
    Ok(cycles)
}

/// Generators plus degree: the input description of a permutation group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    pub degree: usize,
    pub generators: Vec<Perm>,
}

impl GroupSpec {
    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<GroupSpec, GroupError> {
        if degree > u16::MAX as usize {
            return Err(GroupError::BadPermutation {
                degree,
                detail: "degree too large".into(),
            });
        }
        if let Some(bad) = generators.iter().find(|g| g.degree() != degree) {
            return Err(GroupError::BadPermutation {
                degree,
                detail: format!("generator {bad} has degree {}", bad.degree()),
            });
        }
        Ok(GroupSpec { degree, generators })
    }

    /// Builds from 1-based cycle-notation strings; degree is the largest
    /// point mentioned unless given.
    pub fn from_cycle_strings<S: AsRef<str>>(
        degree: Option<usize>,
        lines: &[S],
    ) -> Result<GroupSpec, GroupError> {
        let parsed = lines
            .iter()
            .map(|l| parse_cycles(l.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        let max_point = parsed
            .iter()
            .flatten()
            .flatten()
            .copied()
            .max()
            .unwrap_or(1);
        let degree = degree.unwrap_or(max_point).max(1);
        let generators = parsed
            .iter()
            .map(|c| Perm::from_cycles(degree, c))
            .collect::<Result<Vec<_>, _>>()?;
        GroupSpec::new(degree, generators)
    }

    /// Text format: one permutation per line in cycle notation. Blank lines
    /// and `#` comments are skipped; an optional `degree N` line fixes the
    /// degree.
    pub fn parse(text: &str) -> Result<GroupSpec, GroupError> {
        let mut degree = None;
        let mut lines = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(d) = line.strip_prefix("degree") {
                let d = d.trim().parse::<usize>().map_err(|_| GroupError::Parse {
                    text: line.to_string(),
                    reason: "bad degree".into(),
                })?;
                degree = Some(d);
                continue;
            }
            lines.push(line.to_string());
        }
        GroupSpec::from_cycle_strings(degree, &lines)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("degree {}\n", self.degree);
        for g in &self.generators {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    /// Non-identity generators, deduplicated and sorted by image tuple.
    pub fn canonical_generators(&self) -> Vec<Perm> {
        let mut gens: Vec<Perm> = self
            .generators
            .iter()
            .filter(|g| !g.is_identity())
            .cloned()
            .collect();
        gens.sort();
        gens.dedup();
        gens
    }

    /// SHA-256 over the degree and canonical generator list.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(format!("degree={}\n", self.degree));
        for g in self.canonical_generators() {
            let line: Vec<String> = g.images().iter().map(|x| (x + 1).to_string()).collect();
            hasher.update(line.join(" "));
            hasher.update("\n");
        }
        hex::encode(hasher.finalize())
    }

    pub fn symmetric(n: usize) -> GroupSpec {
        let n = n.max(1);
        let mut gens = Vec::new();
        if n >= 2 {
            gens.push(Perm::from_cycles(n, &[(1..=n).collect()]).unwrap());
            gens.push(Perm::from_cycles(n, &[vec![1, 2]]).unwrap());
        }
        GroupSpec::new(n, gens).unwrap()
    }

    /// `A_n` generated by the 3-cycles `(1 2 k)`.
    pub fn alternating(n: usize) -> GroupSpec {
        let n = n.max(1);
        let gens = (3..=n)
            .map(|k| Perm::from_cycles(n, &[vec![1, 2, k]]).unwrap())
            .collect();
        GroupSpec::new(n, gens).unwrap()
    }

    pub fn cyclic(n: usize) -> GroupSpec {
        let n = n.max(1);
        let gens = if n >= 2 {
            vec![Perm::from_cycles(n, &[(1..=n).collect()]).unwrap()]
        } else {
            Vec::new()
        };
        GroupSpec::new(n, gens).unwrap()
    }

    /// Dihedral group of order `2n` acting on an `n`-gon (`n >= 3`).
    pub fn dihedral(n: usize) -> GroupSpec {
        let rotation = Perm::from_cycles(n, &[(1..=n).collect()]).unwrap();
        let reflection: Vec<u16> = (0..n).map(|i| ((n - i) % n) as u16).collect();
        GroupSpec::new(n, vec![rotation, Perm::from_images(reflection).unwrap()]).unwrap()
    }

    /// Direct product acting on the disjoint union of the point sets.
    pub fn direct_product(factors: &[GroupSpec]) -> GroupSpec {
        let degree: usize = factors.iter().map(|f| f.degree).sum();
        let mut gens = Vec::new();
        let mut offset = 0;
        for f in factors {
            gens.extend(f.generators.iter().map(|g| g.shift(offset, degree)));
            offset += f.degree;
        }
        GroupSpec::new(degree.max(1), gens).unwrap()
    }
}

#[derive(Serialize, Deserialize)]
struct GroupSpecJson {
    degree: usize,
    generators: Vec<String>,
}

impl Serialize for GroupSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        GroupSpecJson {
            degree: self.degree,
            generators: self.generators.iter().map(|g| g.to_string()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = GroupSpecJson::deserialize(deserializer)?;
        GroupSpec::from_cycle_strings(Some(raw.degree), &raw.generators)
            .map_err(serde::de::Error::custom)
    }
}

/// A finite permutation group with all elements enumerated and sorted by
/// image tuple.
#[derive(Clone, Debug)]
pub struct PermGroup {
    spec: GroupSpec,
    elements: Vec<Perm>,
    identity: u32,
    inverses: Vec<u32>,
    table: Option<Vec<u32>>,
}

impl PartialEq for PermGroup {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec && self.elements == other.elements
    }
}

impl PermGroup {
    /// Closes the generators under composition.
    pub fn close(spec: &GroupSpec, limit: usize) -> Result<PermGroup, GroupError> {
        let degree = spec.degree;
        let identity = Perm::identity(degree);
        let gens = spec.canonical_generators();
        let mut seen: HashSet<Perm> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(identity.clone());
        queue.push_back(identity);
        while let Some(x) = queue.pop_front() {
            for g in &gens {
                let y = x.then(g);
                if !seen.contains(&y) {
                    if seen.len() >= limit {
                        return Err(GroupError::OrderLimit { limit });
                    }
                    seen.insert(y.clone());
                    queue.push_back(y);
                }
            }
        }
        let mut elements: Vec<Perm> = seen.into_iter().collect();
        elements.sort();
        Ok(PermGroup::from_sorted(spec.clone(), elements))
    }

    fn from_sorted(spec: GroupSpec, elements: Vec<Perm>) -> PermGroup {
        let index_of = |p: &Perm| elements.binary_search(p).expect("closed set") as u32;
        let identity = index_of(&Perm::identity(spec.degree));
        let inverses = elements.iter().map(|p| index_of(&p.inverse())).collect();
        let n = elements.len();
        let table = (n <= TABLE_ORDER_LIMIT).then(|| {
            let mut t = Vec::with_capacity(n * n);
            for a in &elements {
                for b in &elements {
                    t.push(index_of(&a.then(b)));
                }
            }
            t
        });
        PermGroup {
            spec,
            elements,
            identity,
            inverses,
            table,
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn degree(&self) -> usize {
        self.spec.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.spec.generators
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn identity_index(&self) -> u32 {
        self.identity
    }

    pub fn index_of(&self, p: &Perm) -> Option<u32> {
        self.elements.binary_search(p).ok().map(|i| i as u32)
    }

    /// Index of `elements[a] * elements[b]`.
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.table {
            Some(t) => t[a as usize * self.elements.len() + b as usize],
            None => {
                let p = self.elements[a as usize].then(&self.elements[b as usize]);
                self.index_of(&p).expect("group is closed")
            }
        }
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inverses[a as usize]
    }

    /// Members of the subgroup generated by the given element indices.
    pub fn generate(&self, gens: &[u32]) -> MemberSet {
        let mut set = MemberSet::singleton(self.order(), self.identity);
        self.extend_closure(&mut set, &[self.identity], gens);
        set
    }

    /// Grows `set` (closed under some generators) to the closure under
    /// `gens`, starting the search from `frontier`.
    fn extend_closure(&self, set: &mut MemberSet, frontier: &[u32], gens: &[u32]) {
        let mut stack: Vec<u32> = frontier.to_vec();
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if set.insert(y) {
                    stack.push(y);
                }
            }
        }
    }

    /// `<H, gens>` built as a union of right cosets `H r`: a coset is added
    /// whole whenever `r * s` falls outside the current set.
    fn join_cosets(&self, h: &MemberSet, h_members: &[u32], gens: &[u32]) -> MemberSet {
        let mut set = h.clone();
        let mut reps = vec![self.identity];
        let mut i = 0;
        while i < reps.len() {
            let r = reps[i];
            i += 1;
            for &s in gens {
                let c = self.mul(r, s);
                if set.contains(c) {
                    continue;
                }
                for &x in h_members {
                    set.insert(self.mul(x, c));
                }
                reps.push(c);
            }
        }
        set
    }

    /// The subgroup generated by explicit permutations of this group.
    pub fn subgroup_generated_by(&self, perms: &[Perm]) -> Result<Subgroup, GroupError> {
        let gens = perms
            .iter()
            .map(|p| self.index_of(p).ok_or(GroupError::NotInLattice))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Subgroup::new(self.generate(&gens)))
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup::new(MemberSet::full(self.order()))
    }

    pub fn trivial(&self) -> Subgroup {
        Subgroup::new(MemberSet::singleton(self.order(), self.identity))
    }

    /// `|G : H|`.
    pub fn index(&self, h: &Subgroup) -> u64 {
        (self.order() / h.order()) as u64
    }

    /// Whether every generator of `G` normalizes `H`.
    pub fn is_normal(&self, h: &Subgroup) -> bool {
        let gens: Vec<u32> = self
            .spec
            .generators
            .iter()
            .map(|p| self.index_of(p).expect("generator in group"))
            .collect();
        gens.iter().all(|&g| {
            let gi = self.inv(g);
            h.members
                .iter()
                .all(|x| h.members.contains(self.mul(self.mul(gi, x), g)))
        })
    }

    /// `HN = G`, i.e. `|H||N| / |H ∩ N| = |G|`, for normal `N`.
    pub fn product_covers(&self, h: &Subgroup, n: &Subgroup) -> Result<bool, GroupError> {
        if !self.is_normal(n) {
            return Err(GroupError::NotNormal);
        }
        let meet = h.members.intersection(&n.members).count();
        Ok(h.order() * n.order() == self.order() * meet)
    }

    /// `G/N` as a permutation group on the left cosets of `N`.
    pub fn quotient(&self, n: &Subgroup, limit: usize) -> Result<PermGroup, GroupError> {
        if !self.is_normal(n) {
            return Err(GroupError::NotNormal);
        }
        let order = self.order();
        let mut coset_of = vec![u32::MAX; order];
        let mut count = 0u32;
        for g in 0..order as u32 {
            if coset_of[g as usize] != u32::MAX {
                continue;
            }
            for x in n.members.iter() {
                coset_of[self.mul(g, x) as usize] = count;
            }
            count += 1;
        }
        let reps: Vec<u32> = {
            let mut r = vec![u32::MAX; count as usize];
            for g in 0..order as u32 {
                let c = coset_of[g as usize] as usize;
                if r[c] == u32::MAX {
                    r[c] = g;
                }
            }
            r
        };
        let gens = self
            .spec
            .generators
            .iter()
            .map(|p| {
                let x = self.index_of(p).expect("generator in group");
                let images: Vec<u16> = reps
                    .iter()
                    .map(|&r| coset_of[self.mul(x, r) as usize] as u16)
                    .collect();
                Perm::from_images(images)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let spec = GroupSpec::new(count as usize, gens)?;
        PermGroup::close(&spec, limit)
    }

    /// Every subgroup, by cyclic seeds closed under joins with cyclic
    /// subgroups.
    pub fn enumerate_subgroups(&self, lattice_limit: usize) -> Result<SubgroupLattice, GroupError> {
        SubgroupLattice::enumerate(self.clone(), lattice_limit)
    }
}

fn is_prime_power(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let p = (2..=n).find(|d| n.is_multiple_of(*d)).expect("n >= 2");
    let mut m = n;
    while m.is_multiple_of(p) {
        m /= p;
    }
    m == 1
}

/// Membership flags over a parent group's element indices.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MemberSet {
    len: usize,
    words: Vec<u64>,
}

impl MemberSet {
    pub fn empty(len: usize) -> MemberSet {
        MemberSet {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn full(len: usize) -> MemberSet {
        let mut s = MemberSet::empty(len);
        for i in 0..len as u32 {
            s.insert(i);
        }
        s
    }

    pub fn singleton(len: usize, x: u32) -> MemberSet {
        let mut s = MemberSet::empty(len);
        s.insert(x);
        s
    }

    pub fn from_indices(len: usize, indices: &[u32]) -> Option<MemberSet> {
        let mut s = MemberSet::empty(len);
        for &i in indices {
            if i as usize >= len || !s.insert(i) {
                return None;
            }
        }
        Some(s)
    }

    pub fn universe(&self) -> usize {
        self.len
    }

    pub fn contains(&self, x: u32) -> bool {
        self.words[(x / 64) as usize] >> (x % 64) & 1 == 1
    }

    /// Returns true if `x` was newly inserted.
    pub fn insert(&mut self, x: u32) -> bool {
        let w = &mut self.words[(x / 64) as usize];
        let bit = 1u64 << (x % 64);
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &MemberSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersection(&self, other: &MemberSet) -> MemberSet {
        MemberSet {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let t = bits.trailing_zeros();
                bits &= bits - 1;
                Some(wi as u32 * 64 + t)
            })
        })
    }
}

/// A subgroup as a set of parent element indices.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subgroup {
    members: MemberSet,
    order: usize,
}

impl Subgroup {
    pub fn new(members: MemberSet) -> Subgroup {
        let order = members.count();
        Subgroup { members, order }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn members(&self) -> &MemberSet {
        &self.members
    }

    pub fn contains(&self, x: u32) -> bool {
        self.members.contains(x)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.order <= other.order && self.members.is_subset(&other.members)
    }

    /// Sorted element indices; the canonical identity of the subgroup.
    pub fn fingerprint(&self) -> Vec<u32> {
        self.members.iter().collect()
    }

    fn sort_key(&self) -> (usize, Vec<u32>) {
        (self.order, self.fingerprint())
    }
}

/// All subgroups of a group, sorted by `(order, fingerprint)`, with the
/// strict inclusion relation.
#[derive(Clone, Debug)]
pub struct SubgroupLattice {
    group: PermGroup,
    subgroups: Vec<Subgroup>,
    /// `above[i]`: indices `j > i` with `subgroups[i] < subgroups[j]`.
    above: Vec<Vec<usize>>,
}

impl SubgroupLattice {
    fn enumerate(group: PermGroup, limit: usize) -> Result<SubgroupLattice, GroupError> {
        let order = group.order();
        let mut found: Vec<(MemberSet, Vec<u32>)> = Vec::new();
        let mut seen: HashMap<MemberSet, usize> = HashMap::new();

        // Cyclic subgroups, one generator each. Includes the trivial group.
        let mut joiners: Vec<u32> = Vec::new();
        for g in 0..order as u32 {
            let set = group.generate(&[g]);
            if !seen.contains_key(&set) {
                if is_prime_power(set.count()) {
                    joiners.push(g);
                }
                seen.insert(set.clone(), found.len());
                found.push((set, vec![g]));
            }
        }
        if found.len() > limit {
            return Err(GroupError::LatticeLimit { limit });
        }

        // Every subgroup is generated by its elements of prime-power order,
        // so closing under H -> <H, g> for prime-power cyclic generators g
        // reaches all of them.
        let mut next = 0;
        while next < found.len() {
            let (base, base_gens) = found[next].clone();
            next += 1;
            let base_members: Vec<u32> = base.iter().collect();
            for &g in &joiners {
                if base.contains(g) {
                    continue;
                }
                let mut gens = base_gens.clone();
                gens.push(g);
                let set = group.join_cosets(&base, &base_members, &gens);
                if seen.contains_key(&set) {
                    continue;
                }
                if found.len() >= limit {
                    return Err(GroupError::LatticeLimit { limit });
                }
                seen.insert(set.clone(), found.len());
                found.push((set, gens));
            }
        }

        let mut subgroups: Vec<Subgroup> =
            found.into_iter().map(|(s, _)| Subgroup::new(s)).collect();
        subgroups.sort_by_cached_key(|s| s.sort_key());
        Ok(SubgroupLattice::from_sorted(group, subgroups))
    }

    /// Builds from subgroups already sorted by `(order, fingerprint)`.
    pub(crate) fn from_sorted(group: PermGroup, subgroups: Vec<Subgroup>) -> SubgroupLattice {
        let mut above = vec![Vec::new(); subgroups.len()];
        for (i, h) in subgroups.iter().enumerate() {
            for (j, k) in subgroups.iter().enumerate().skip(i + 1) {
                if k.order > h.order && k.order % h.order == 0 && h.members.is_subset(&k.members) {
                    above[i].push(j);
                }
            }
        }
        SubgroupLattice {
            group,
            subgroups,
            above,
        }
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn subgroups(&self) -> &[Subgroup] {
        &self.subgroups
    }

    pub fn len(&self) -> usize {
        self.subgroups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgroups.is_empty()
    }

    /// Position of a subgroup in the canonical ordering.
    pub fn position(&self, h: &Subgroup) -> Option<usize> {
        self.subgroups
            .binary_search_by(|s| s.sort_key().cmp(&h.sort_key()))
            .ok()
    }

    pub fn top(&self) -> usize {
        self.subgroups.len() - 1
    }

    pub fn bottom(&self) -> usize {
        0
    }

    /// Indices strictly above `i`.
    pub fn strictly_above(&self, i: usize) -> &[usize] {
        &self.above[i]
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        i == j || self.above[i].binary_search(&j).is_ok()
    }

    /// Strict inclusion pairs `(i, j)`, `subgroups[i] < subgroups[j]`.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        self.above
            .iter()
            .enumerate()
            .flat_map(|(i, ups)| ups.iter().map(move |&j| (i, j)))
            .collect()
    }

    /// Maximal proper subgroups.
    pub fn maximal(&self) -> Vec<usize> {
        let top = self.top();
        (0..top).filter(|&i| self.above[i] == [top]).collect()
    }

    pub fn index(&self, i: usize) -> u64 {
        self.group.index(&self.subgroups[i])
    }

    /// Positions of the normal subgroups of the parent group.
    pub fn normal_subgroups(&self) -> Vec<usize> {
        (0..self.subgroups.len())
            .filter(|&i| self.group.is_normal(&self.subgroups[i]))
            .collect()
    }

    /// Orders of the factors of a chief series `G = N_0 > N_1 > ... > 1`,
    /// top first. Each step takes the largest normal subgroup of `G` inside
    /// the current term.
    pub fn chief_factor_orders(&self) -> Vec<u64> {
        let normal = self.normal_subgroups();
        let mut current = self.top();
        let mut out = Vec::new();
        while self.subgroups[current].order() > 1 {
            let next = normal
                .iter()
                .copied()
                .filter(|&j| j != current && self.leq(j, current))
                .max_by_key(|&j| (self.subgroups[j].order(), std::cmp::Reverse(j)))
                .expect("trivial subgroup is normal");
            out.push((self.subgroups[current].order() / self.subgroups[next].order()) as u64);
            current = next;
        }
        out
    }
}
