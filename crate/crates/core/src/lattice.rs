//! Microtubule geometry: the 13-protofilament dimer cylinder, its helical
//! pathways, MAP binding patterns and the coherent domains they carve out.
//!
//! Sites are addressed by `(protofilament, row)`. Lateral neighbors wrap
//! around the cylinder, and crossing the seam between the last protofilament
//! and protofilament 0 shifts the row by `seam_shift`. Rows do not wrap.

use alloc::borrow::Cow;
use alloc::collections::btree_map::Entry;
use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::qstate::{Conformation, PureState, MAX_QUBITS};
use crate::{Error, Result};

pub const DEFAULT_PROTOFILAMENTS: usize = 13;
pub const DEFAULT_SEAM_SHIFT: usize = 3;
pub const DEFAULT_MAX_DOMAIN_SIZE: usize = 20;
pub const DIMER_LENGTH_NM: f64 = 8.0;
pub const OUTER_DIAMETER_NM: f64 = 25.0;
pub const INNER_DIAMETER_NM: f64 = 15.0;
/// Dipole rotation between the `|a>` and `|b>` conformations.
pub const DIPOLE_FLIP_DEGREES: f64 = 29.0;
/// Helix families along which dimer rows repeat.
pub const HELIX_STARTS: [usize; 3] = [3, 5, 8];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiteIndex {
    pub protofilament: usize,
    pub row: usize,
}

impl SiteIndex {
    pub const fn new(protofilament: usize, row: usize) -> Self {
        Self { protofilament, row }
    }
}

impl From<(usize, usize)> for SiteIndex {
    fn from((protofilament, row): (usize, usize)) -> Self {
        Self { protofilament, row }
    }
}

/// Shape of a single microtubule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LatticeGeometry {
    num_protofilaments: usize,
    num_rows: usize,
    seam_shift: usize,
    diagonal_neighbors: bool,
}

impl LatticeGeometry {
    /// Standard 13-protofilament tube with a 3-row seam.
    pub fn new(num_rows: usize) -> Result<Self> {
        Self::with_params(DEFAULT_PROTOFILAMENTS, num_rows, DEFAULT_SEAM_SHIFT)
    }

    pub fn with_params(
        num_protofilaments: usize,
        num_rows: usize,
        seam_shift: usize,
    ) -> Result<Self> {
        if num_protofilaments < 3 {
            return Err(Error::param("protofilaments", "need at least 3"));
        }
        if num_rows == 0 {
            return Err(Error::param("rows", "must be at least 1"));
        }
        Ok(Self {
            num_protofilaments,
            num_rows,
            seam_shift,
            diagonal_neighbors: false,
        })
    }

    /// Adds the two diagonal contacts of the hexagonal lattice,
    /// `(p+1, r+1)` and `(p-1, r-1)`, to each site.
    pub fn with_diagonals(mut self, enabled: bool) -> Self {
        self.diagonal_neighbors = enabled;
        self
    }

    pub fn num_protofilaments(&self) -> usize {
        self.num_protofilaments
    }

    pub fn num_rows(&self) -> usize {
        self.num_rows
    }

    pub fn seam_shift(&self) -> usize {
        self.seam_shift
    }

    pub fn diagonal_neighbors(&self) -> bool {
        self.diagonal_neighbors
    }

    pub fn num_sites(&self) -> usize {
        self.num_protofilaments * self.num_rows
    }

    /// Length of the tube in nanometres.
    pub fn length_nm(&self) -> f64 {
        self.num_rows as f64 * DIMER_LENGTH_NM
    }

    pub fn contains(&self, site: SiteIndex) -> bool {
        site.protofilament < self.num_protofilaments && site.row < self.num_rows
    }

    fn check(&self, site: SiteIndex) -> Result<()> {
        if self.contains(site) {
            Ok(())
        } else {
            Err(Error::InvalidSite {
                protofilament: site.protofilament,
                row: site.row,
            })
        }
    }

    /// Dense id in lexicographic `(protofilament, row)` order.
    pub fn site_id(&self, site: SiteIndex) -> usize {
        site.protofilament * self.num_rows + site.row
    }

    pub fn site_at(&self, id: usize) -> SiteIndex {
        SiteIndex::new(id / self.num_rows, id % self.num_rows)
    }

    /// Sites in lexicographic order.
    pub fn sites(&self) -> impl Iterator<Item = SiteIndex> + '_ {
        (0..self.num_sites()).map(|id| self.site_at(id))
    }

    /// Lateral step towards increasing protofilament, as a signed row offset
    /// that may leave the lattice.
    fn step_up(&self, site: SiteIndex) -> (usize, isize) {
        if site.protofilament + 1 < self.num_protofilaments {
            (site.protofilament + 1, site.row as isize)
        } else {
            (0, site.row as isize + self.seam_shift as isize)
        }
    }

    fn step_down(&self, site: SiteIndex) -> (usize, isize) {
        if site.protofilament > 0 {
            (site.protofilament - 1, site.row as isize)
        } else {
            (
                self.num_protofilaments - 1,
                site.row as isize - self.seam_shift as isize,
            )
        }
    }

    fn in_rows(&self, (pf, row): (usize, isize)) -> Option<SiteIndex> {
        (row >= 0 && (row as usize) < self.num_rows).then(|| SiteIndex::new(pf, row as usize))
    }

    /// Neighbors in the order: row-1, row+1, lateral down, lateral up, then
    /// the diagonals if enabled. Out-of-range rows are dropped.
    pub fn neighbors(&self, site: SiteIndex) -> Result<Vec<SiteIndex>> {
        self.check(site)?;
        let row = site.row as isize;
        let mut out = Vec::with_capacity(6);
        let mut push = |candidate: Option<SiteIndex>| {
            if let Some(s) = candidate {
                if s != site && !out.contains(&s) {
                    out.push(s);
                }
            }
        };
        push(self.in_rows((site.protofilament, row - 1)));
        push(self.in_rows((site.protofilament, row + 1)));
        push(self.in_rows(self.step_down(site)));
        push(self.in_rows(self.step_up(site)));
        if self.diagonal_neighbors {
            let (pf, r) = self.step_up(site);
            push(self.in_rows((pf, r + 1)));
            let (pf, r) = self.step_down(site);
            push(self.in_rows((pf, r - 1)));
        }
        Ok(out)
    }

    pub fn are_adjacent(&self, a: SiteIndex, b: SiteIndex) -> Result<bool> {
        self.check(b)?;
        Ok(self.neighbors(a)?.contains(&b))
    }

    /// All lattice edges, each once, in lexicographic order.
    pub fn edges(&self) -> Vec<Edge> {
        let mut edges = Vec::new();
        for site in self.sites() {
            for n in self.neighbors(site).expect("site in range") {
                if site < n {
                    edges.push(Edge { a: site, b: n });
                }
            }
        }
        edges.sort_unstable();
        edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    /// Walks lateral steps around the cylinder from `start` until the next
    /// step would leave the lattice. Each full turn rises by `seam_shift`
    /// rows, so configuring `seam_shift = starts` realizes that helix family.
    pub fn helical_path(&self, start: SiteIndex, starts: usize) -> Result<Vec<SiteIndex>> {
        if !HELIX_STARTS.contains(&starts) {
            return Err(Error::InvalidHelix(starts));
        }
        self.check(start)?;
        let mut path = vec![start];
        let mut current = start;
        while let Some(next) = self.in_rows(self.step_up(current)) {
            if next == start {
                // seam_shift = 0 closes the ring
                break;
            }
            path.push(next);
            current = next;
        }
        Ok(path)
    }
}

/// Undirected lattice edge with `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    a: SiteIndex,
    b: SiteIndex,
}

impl Edge {
    pub fn new(x: SiteIndex, y: SiteIndex) -> Self {
        if x <= y {
            Self { a: x, b: y }
        } else {
            Self { a: y, b: x }
        }
    }

    pub fn endpoints(&self) -> (SiteIndex, SiteIndex) {
        (self.a, self.b)
    }
}

/// Set of MAP-occupied lattice edges: the engram.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MapBindingPattern {
    geometry: LatticeGeometry,
    bound: BTreeSet<Edge>,
}

impl MapBindingPattern {
    pub fn empty(geometry: LatticeGeometry) -> Self {
        Self {
            geometry,
            bound: BTreeSet::new(),
        }
    }

    pub fn from_edges(
        geometry: LatticeGeometry,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self> {
        let mut pattern = Self::empty(geometry);
        for e in edges {
            pattern.bind(e.a, e.b)?;
        }
        Ok(pattern)
    }

    /// Every lattice edge bound.
    pub fn full(geometry: LatticeGeometry) -> Self {
        Self {
            geometry,
            bound: geometry.edges().into_iter().collect(),
        }
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geometry
    }

    pub fn bound_edges(&self) -> impl Iterator<Item = &Edge> {
        self.bound.iter()
    }

    pub fn len(&self) -> usize {
        self.bound.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bound.is_empty()
    }

    pub fn is_bound(&self, x: SiteIndex, y: SiteIndex) -> bool {
        self.bound.contains(&Edge::new(x, y))
    }

    /// Places a MAP on the contact between `x` and `y`. Idempotent.
    pub fn bind(&mut self, x: SiteIndex, y: SiteIndex) -> Result<()> {
        self.check_edge(x, y)?;
        self.bound.insert(Edge::new(x, y));
        Ok(())
    }

    /// Removes a MAP from the contact between `x` and `y`. Idempotent.
    pub fn unbind(&mut self, x: SiteIndex, y: SiteIndex) -> Result<()> {
        self.check_edge(x, y)?;
        self.bound.remove(&Edge::new(x, y));
        Ok(())
    }

    /// Flips the binding state of one edge.
    pub fn toggle(&mut self, x: SiteIndex, y: SiteIndex) -> Result<()> {
        self.check_edge(x, y)?;
        let e = Edge::new(x, y);
        if !self.bound.remove(&e) {
            self.bound.insert(e);
        }
        Ok(())
    }

    fn check_edge(&self, x: SiteIndex, y: SiteIndex) -> Result<()> {
        if self.geometry.are_adjacent(x, y)? {
            Ok(())
        } else {
            Err(Error::NotAdjacent)
        }
    }

    /// Random pattern binding each lattice edge independently with
    /// probability `density`.
    pub fn random<R: rand::Rng + ?Sized>(
        geometry: LatticeGeometry,
        density: f64,
        rng: &mut R,
    ) -> Self {
        let bound = geometry
            .edges()
            .into_iter()
            .filter(|_| rng.random::<f64>() < density)
            .collect();
        Self { geometry, bound }
    }
}

/// Fraction of lattice edges on which the two patterns disagree.
pub fn engram_distance(p1: &MapBindingPattern, p2: &MapBindingPattern) -> Result<f64> {
    if p1.geometry != p2.geometry {
        return Err(Error::GeometryMismatch);
    }
    let differing = p1.bound.symmetric_difference(&p2.bound).count();
    Ok(differing as f64 / p1.geometry.edge_count() as f64)
}

/// How bound MAPs affect entanglement across an edge.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum MapRole {
    /// Bound edges are cut; domains form across unbound contacts.
    #[default]
    Barrier,
    /// Only bound edges couple sites.
    Coupling,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PartitionOptions {
    pub max_domain_size: usize,
    pub map_role: MapRole,
}

impl Default for PartitionOptions {
    fn default() -> Self {
        Self {
            max_domain_size: DEFAULT_MAX_DOMAIN_SIZE,
            map_role: MapRole::Barrier,
        }
    }
}

/// A connected group of sites sharing one pure state.
///
/// The state starts as all-`|a>` and is only materialized on first mutable
/// access, so partitioning a long tube does not allocate `2^20`-entry
/// vectors for domains that never evolve.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentDomain {
    sites: Vec<SiteIndex>,
    state: Option<PureState>,
}

impl CoherentDomain {
    /// Domain over `sites` (sorted and deduplicated) in the all-`|a>` state.
    pub fn new(mut sites: Vec<SiteIndex>) -> Result<Self> {
        sites.sort_unstable();
        sites.dedup();
        if sites.is_empty() || sites.len() > MAX_QUBITS {
            return Err(Error::QubitCount {
                got: sites.len(),
                max: MAX_QUBITS,
            });
        }
        Ok(Self { sites, state: None })
    }

    pub fn with_state(sites: Vec<SiteIndex>, state: PureState) -> Result<Self> {
        let mut domain = Self::new(sites)?;
        domain.set_state(state)?;
        Ok(domain)
    }

    /// Sites in lexicographic order; qubit `i` is `sites()[i]`.
    pub fn sites(&self) -> &[SiteIndex] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn qubit_of(&self, site: SiteIndex) -> Option<usize> {
        self.sites.binary_search(&site).ok()
    }

    /// True while the domain is still in its untouched all-`|a>` state.
    pub fn is_ground(&self) -> bool {
        self.state.is_none()
    }

    pub fn state(&self) -> Cow<'_, PureState> {
        match &self.state {
            Some(s) => Cow::Borrowed(s),
            None => Cow::Owned(PureState::ground(self.sites.len()).expect("size checked")),
        }
    }

    pub fn state_mut(&mut self) -> &mut PureState {
        let n = self.sites.len();
        self.state
            .get_or_insert_with(|| PureState::ground(n).expect("size checked"))
    }

    pub fn set_state(&mut self, state: PureState) -> Result<()> {
        if state.num_qubits() != self.sites.len() {
            return Err(Error::DimensionMismatch {
                left: self.sites.len(),
                right: state.num_qubits(),
            });
        }
        self.state = Some(state);
        Ok(())
    }

    /// Resets to the all-`|a>` state.
    pub fn reset(&mut self) {
        self.state = None;
    }
}

/// Splits the lattice into coherent domains with the default barrier role.
pub fn partition_domains(
    geometry: &LatticeGeometry,
    pattern: &MapBindingPattern,
    max_domain_size: usize,
) -> Result<Vec<CoherentDomain>> {
    partition_domains_with(
        geometry,
        pattern,
        &PartitionOptions {
            max_domain_size,
            map_role: MapRole::Barrier,
        },
    )
}

/// Connected components of the coupling graph, with oversized components
/// broken into chunks of at most `max_domain_size` sites.
///
/// An oversized component is split by growing a breadth-first chunk from its
/// smallest site (visiting neighbors in lexicographic order) until the chunk
/// holds `max_domain_size` sites, then removing every edge that bridges the
/// chunk to the rest of the component in lexicographic order. The remainder
/// is re-split the same way. Domains are returned ordered by smallest site.
pub fn partition_domains_with(
    geometry: &LatticeGeometry,
    pattern: &MapBindingPattern,
    options: &PartitionOptions,
) -> Result<Vec<CoherentDomain>> {
    if options.max_domain_size == 0 {
        return Err(Error::param("max_domain_size", "must be at least 1"));
    }
    if options.max_domain_size > MAX_QUBITS {
        return Err(Error::param(
            "max_domain_size",
            "exceeds the dense-state limit",
        ));
    }
    if pattern.geometry() != geometry {
        return Err(Error::GeometryMismatch);
    }

    let n = geometry.num_sites();
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for edge in geometry.edges() {
        let bound = pattern.bound.contains(&edge);
        let couples = match options.map_role {
            MapRole::Barrier => !bound,
            MapRole::Coupling => bound,
        };
        if couples {
            let (i, j) = (geometry.site_id(edge.a), geometry.site_id(edge.b));
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }

    let mut domains = Vec::new();
    for component in components(&adjacency, None) {
        split_component(
            &mut adjacency,
            component,
            options.max_domain_size,
            &mut domains,
        );
    }
    domains.sort_unstable_by_key(|d: &Vec<usize>| d[0]);
    domains
        .into_iter()
        .map(|ids| CoherentDomain::new(ids.into_iter().map(|id| geometry.site_at(id)).collect()))
        .collect()
}

fn split_component(
    adjacency: &mut [Vec<usize>],
    component: Vec<usize>,
    max: usize,
    out: &mut Vec<Vec<usize>>,
) {
    if component.len() <= max {
        out.push(component);
        return;
    }
    let chunk = bfs_chunk(adjacency, component[0], max);
    let in_chunk: BTreeSet<usize> = chunk.iter().copied().collect();
    let mut bridging: Vec<(usize, usize)> = chunk
        .iter()
        .flat_map(|&u| {
            adjacency[u]
                .iter()
                .filter(|v| !in_chunk.contains(v))
                .map(move |&v| (u.min(v), u.max(v)))
        })
        .collect();
    bridging.sort_unstable();
    for (u, v) in bridging {
        adjacency[u].retain(|&w| w != v);
        adjacency[v].retain(|&w| w != u);
    }
    let mut chunk = chunk;
    chunk.sort_unstable();
    out.push(chunk);

    let rest: BTreeSet<usize> = component
        .into_iter()
        .filter(|u| !in_chunk.contains(u))
        .collect();
    for sub in components(adjacency, Some(&rest)) {
        split_component(adjacency, sub, max, out);
    }
}

fn bfs_chunk(adjacency: &[Vec<usize>], start: usize, max: usize) -> Vec<usize> {
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    let mut chunk = Vec::with_capacity(max);
    while let Some(u) = queue.pop_front() {
        chunk.push(u);
        if chunk.len() == max {
            break;
        }
        for &v in &adjacency[u] {
            if seen.len() < max && seen.insert(v) {
                queue.push_back(v);
            }
        }
    }
    chunk
}

/// Connected components (each sorted) restricted to `subset` when given,
/// ordered by smallest member.
fn components(adjacency: &[Vec<usize>], subset: Option<&BTreeSet<usize>>) -> Vec<Vec<usize>> {
    let nodes: Vec<usize> = match subset {
        Some(s) => s.iter().copied().collect(),
        None => (0..adjacency.len()).collect(),
    };
    let mut label: BTreeMap<usize, usize> = BTreeMap::new();
    let mut out = Vec::new();
    for &root in &nodes {
        if label.contains_key(&root) {
            continue;
        }
        let id = out.len();
        let mut members = vec![root];
        label.insert(root, id);
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            for &v in &adjacency[u] {
                if let Entry::Vacant(e) = label.entry(v) {
                    e.insert(id);
                    members.push(v);
                    stack.push(v);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// One dimer with its conformation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TubulinSite {
    pub site: SiteIndex,
    pub conformation: Conformation,
}

impl TubulinSite {
    pub fn dipole_angle_degrees(&self) -> f64 {
        match self.conformation {
            Conformation::A => 0.0,
            Conformation::B => DIPOLE_FLIP_DEGREES,
        }
    }

    /// Unit dipole direction in the plane of the flip.
    pub fn dipole_vector(&self) -> [f64; 2] {
        let theta = self.dipole_angle_degrees().to_radians();
        [libm::cos(theta), libm::sin(theta)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn s(p: usize, r: usize) -> SiteIndex {
        SiteIndex::new(p, r)
    }

    #[test]
    fn interior_and_seam_neighbors() {
        let g = LatticeGeometry::new(10).unwrap();
        assert_eq!(
            g.neighbors(s(5, 5)).unwrap(),
            vec![s(5, 4), s(5, 6), s(4, 5), s(6, 5)]
        );
        let n = g.neighbors(s(12, 5)).unwrap();
        assert!(n.contains(&s(11, 5)) && n.contains(&s(0, 8)));
        assert_eq!(n.len(), 4);
        assert_eq!(g.neighbors(s(0, 0)).unwrap(), vec![s(0, 1), s(1, 0)]);
        assert_eq!(
            g.neighbors(s(0, 5)).unwrap(),
            vec![s(0, 4), s(0, 6), s(12, 2), s(1, 5)]
        );
        assert!(g.neighbors(s(13, 0)).is_err());
        assert!(g.neighbors(s(0, 10)).is_err());
    }

    #[test]
    fn diagonal_flag_adds_two_contacts() {
        let g = LatticeGeometry::new(10).unwrap().with_diagonals(true);
        let n = g.neighbors(s(5, 5)).unwrap();
        assert_eq!(n.len(), 6);
        assert!(n.contains(&s(6, 6)) && n.contains(&s(4, 4)));
        let seam = g.neighbors(s(12, 5)).unwrap();
        assert!(seam.contains(&s(0, 9)));
    }

    #[test]
    fn single_row_tube_is_a_chain() {
        let g = LatticeGeometry::new(1).unwrap();
        assert_eq!(g.neighbors(s(12, 0)).unwrap(), vec![s(11, 0)]);
        assert_eq!(g.edge_count(), 12);
    }

    #[test]
    fn helical_walk() {
        let g = LatticeGeometry::new(30).unwrap();
        let path = g.helical_path(s(0, 0), 3).unwrap();
        assert_eq!(path[13], s(0, 3));
        assert!(g.helical_path(s(0, 0), 4).is_err());
        let g5 = LatticeGeometry::with_params(13, 30, 5).unwrap();
        assert_eq!(g5.helical_path(s(0, 0), 5).unwrap()[13], s(0, 5));
        let ring = LatticeGeometry::with_params(13, 4, 0).unwrap();
        assert_eq!(ring.helical_path(s(0, 1), 3).unwrap().len(), 13);
    }

    #[test]
    fn bind_unbind() {
        let g = LatticeGeometry::new(4).unwrap();
        let empty = MapBindingPattern::empty(g);
        let mut p = empty.clone();
        p.bind(s(0, 0), s(0, 1)).unwrap();
        p.bind(s(0, 1), s(0, 0)).unwrap();
        assert_eq!(p.len(), 1);
        p.unbind(s(0, 0), s(0, 1)).unwrap();
        assert_eq!(p, empty);
        assert_eq!(p.bind(s(0, 0), s(3, 3)), Err(Error::NotAdjacent));
        assert!(p.bind(s(0, 0), s(0, 9)).is_err());
    }

    #[test]
    fn distance_examples() {
        let g = LatticeGeometry::new(4).unwrap();
        let mut rng = crate::SimRng::seed_from_u64(4);
        let p = MapBindingPattern::random(g, 0.3, &mut rng);
        assert_eq!(engram_distance(&p, &p).unwrap(), 0.0);
        let mut q = p.clone();
        q.toggle(s(2, 1), s(3, 1)).unwrap();
        assert_eq!(
            engram_distance(&p, &q).unwrap(),
            1.0 / g.edge_count() as f64
        );
        let other = MapBindingPattern::empty(LatticeGeometry::new(5).unwrap());
        assert_eq!(engram_distance(&p, &other), Err(Error::GeometryMismatch));
    }

    #[test]
    fn partition_examples() {
        let ring = LatticeGeometry::new(1).unwrap();
        let d = partition_domains(&ring, &MapBindingPattern::empty(ring), 20).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].len(), 13);

        let g = LatticeGeometry::new(3).unwrap();
        let d = partition_domains(&g, &MapBindingPattern::full(g), 20).unwrap();
        assert_eq!(d.len(), 39);
        assert!(d.iter().all(|x| x.len() == 1));

        assert!(partition_domains(&g, &MapBindingPattern::empty(g), 0).is_err());
    }

    #[test]
    fn coupling_role_inverts_cuts() {
        let g = LatticeGeometry::new(2).unwrap();
        let opts = PartitionOptions {
            max_domain_size: 26,
            map_role: MapRole::Coupling,
        };
        let d = partition_domains_with(&g, &MapBindingPattern::empty(g), &opts).unwrap();
        assert_eq!(d.len(), 26);
        let d = partition_domains_with(&g, &MapBindingPattern::full(g), &opts).unwrap();
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn oversized_components_split_into_bfs_chunks() {
        let ring = LatticeGeometry::new(1).unwrap();
        let d = partition_domains(&ring, &MapBindingPattern::empty(ring), 5).unwrap();
        let sizes: Vec<usize> = d.iter().map(|x| x.len()).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 13);
        assert!(sizes.iter().all(|&x| x <= 5));
        // one row: the seam partner of pf 12 falls off the lattice, leaving a chain
        assert_eq!(d[0].sites(), &[s(0, 0), s(1, 0), s(2, 0), s(3, 0), s(4, 0)]);
        let ring = LatticeGeometry::with_params(13, 1, 0).unwrap();
        let d = partition_domains(&ring, &MapBindingPattern::empty(ring), 5).unwrap();
        assert_eq!(
            d[0].sites(),
            &[s(0, 0), s(1, 0), s(2, 0), s(11, 0), s(12, 0)]
        );
    }

    #[test]
    fn domain_state_is_lazy() {
        let mut d = CoherentDomain::new(vec![s(1, 0), s(0, 0)]).unwrap();
        assert_eq!(d.sites(), &[s(0, 0), s(1, 0)]);
        assert!(d.is_ground());
        assert_eq!(*d.state(), PureState::ground(2).unwrap());
        d.state_mut();
        assert!(!d.is_ground());
        assert!(d.set_state(PureState::ground(3).unwrap()).is_err());
        assert!(CoherentDomain::new(vec![]).is_err());
    }

    #[test]
    fn dipole_vectors() {
        let a = TubulinSite {
            site: s(0, 0),
            conformation: Conformation::A,
        };
        let b = TubulinSite {
            site: s(0, 0),
            conformation: Conformation::B,
        };
        assert_eq!(a.dipole_vector(), [1.0, 0.0]);
        let [x, y] = b.dipole_vector();
        assert!((x - 0.8746).abs() < 1e-4 && (y - 0.4848).abs() < 1e-4);
        assert!(((x * x + y * y) - 1.0).abs() < 1e-15);
        let angle = libm::acos(x).to_degrees();
        assert!((angle - 29.0).abs() < 1e-9);
    }
}
