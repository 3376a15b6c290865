//! Direct-stiffness analysis of continuous beams with exact two-node
//! Timoshenko elements.
//!
//! Degrees of freedom per node are the vertical displacement `v` (up positive)
//! and the section rotation `θ` (counter-clockwise positive). Loads are in kN
//! and kN/m with gravity loads positive downward; stiffnesses in kN and kN·m².
//!
//! Sign convention for recovered internal forces at a distance `x` from the
//! left end of an element carrying a downward UDL `w`:
//!
//! * shear `V(x) = F₁ − w·x`, positive when the resultant on the left part acts upward;
//! * moment `M(x) = −M₁ + F₁·x − w·x²/2`, sagging positive;
//!
//! where `F₁`, `M₁` are the force and moment exerted on the element at its left node.

use nalgebra::{DMatrix, DVector, Matrix4, Vector4};

use crate::error::{Error, Result};
use crate::model::{BeamSystem, Material};

/// Normalised abscissae 0.0, 0.1, …, 1.0.
pub const STATION_COUNT: usize = 11;

/// Shear flexibility parameter Φ = 12EI / (GA_z L²).
pub fn shear_parameter(flexural_rigidity: f64, shear_rigidity: f64, length: f64) -> f64 {
    12.0 * flexural_rigidity / (shear_rigidity * length * length)
}

/// Exact stiffness of a prismatic Timoshenko beam element, DOF order
/// `[v₁, θ₁, v₂, θ₂]`. Any consistent unit system may be used.
pub fn element_stiffness(
    elastic_modulus: f64,
    second_moment: f64,
    shear_rigidity: f64,
    length: f64,
) -> Result<Matrix4<f64>> {
    for (name, value) in [
        ("elastic modulus", elastic_modulus),
        ("second moment", second_moment),
        ("shear rigidity", shear_rigidity),
        ("length", length),
    ] {
        if value.is_nan() || value <= 0.0 {
            return Err(Error::Invalid(format!("{name} must be positive, got {value}")));
        }
    }
    Ok(timoshenko_stiffness(elastic_modulus * second_moment, shear_rigidity, length))
}

fn timoshenko_stiffness(ei: f64, gaz: f64, l: f64) -> Matrix4<f64> {
    let phi = if gaz.is_infinite() {
        0.0
    } else {
        shear_parameter(ei, gaz, l)
    };
    let c = ei / ((1.0 + phi) * l * l * l);
    let l2 = l * l;
    Matrix4::new(
        12.0, 6.0 * l, -12.0, 6.0 * l,
        6.0 * l, (4.0 + phi) * l2, -6.0 * l, (2.0 - phi) * l2,
        -12.0, -6.0 * l, 12.0, -6.0 * l,
        6.0 * l, (2.0 - phi) * l2, -6.0 * l, (4.0 + phi) * l2,
    ) * c
}

/// Reactions of a clamped-clamped element under a downward UDL `w`:
/// `[F₁, M₁, F₂, M₂]` acting on the element. For a uniform load these do not
/// depend on the shear parameter.
pub fn fixed_end_forces(w: f64, length: f64, _shear_parameter: f64) -> Result<[f64; 4]> {
    if length.is_nan() || length <= 0.0 {
        return Err(Error::Invalid(format!("length must be positive, got {length}")));
    }
    let shear = w * length / 2.0;
    let moment = w * length * length / 12.0;
    Ok([shear, moment, shear, -moment])
}

/// One beam element between two model nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Element {
    pub start: usize,
    pub end: usize,
    /// EI, kN·m².
    pub flexural_rigidity: f64,
    /// G·A_z, kN. `f64::INFINITY` gives an Euler-Bernoulli element.
    pub shear_rigidity: f64,
}

/// Nodes on a line, elements between them and vertical supports.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamModel {
    pub positions: Vec<f64>,
    pub supported: Vec<bool>,
    pub elements: Vec<Element>,
}

/// Loads applied to a [`BeamModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct LoadCase {
    /// Downward UDL per element, kN/m.
    pub element_udl: Vec<f64>,
    /// Nodal `(force, moment)`; force upward positive, moment counter-clockwise positive.
    pub nodal: Vec<(f64, f64)>,
}

impl LoadCase {
    pub fn zeros(model: &BeamModel) -> Self {
        Self {
            element_udl: vec![0.0; model.elements.len()],
            nodal: vec![(0.0, 0.0); model.positions.len()],
        }
    }
}

impl BeamModel {
    /// One element per member, supports at every member end.
    pub fn continuous(spans: &[f64], flexural: &[f64], shear: &[f64]) -> Self {
        Self::subdivided(spans, flexural, shear, 1)
    }

    /// Each member split into `divisions` equal elements; only member ends are supported.
    pub fn subdivided(spans: &[f64], flexural: &[f64], shear: &[f64], divisions: usize) -> Self {
        let divisions = divisions.max(1);
        let mut positions = vec![0.0];
        let mut supported = vec![true];
        let mut elements = Vec::with_capacity(spans.len() * divisions);
        let mut x0 = 0.0;
        for (i, &l) in spans.iter().enumerate() {
            for k in 1..=divisions {
                let node = positions.len();
                positions.push(x0 + l * k as f64 / divisions as f64);
                supported.push(k == divisions);
                elements.push(Element {
                    start: node - 1,
                    end: node,
                    flexural_rigidity: flexural[i],
                    shear_rigidity: shear[i],
                });
            }
            x0 += l;
        }
        Self {
            positions,
            supported,
            elements,
        }
    }

    pub fn element_length(&self, e: usize) -> f64 {
        let el = &self.elements[e];
        self.positions[el.end] - self.positions[el.start]
    }

    fn element_matrix(&self, e: usize) -> Matrix4<f64> {
        let el = &self.elements[e];
        timoshenko_stiffness(el.flexural_rigidity, el.shear_rigidity, self.element_length(e))
    }

    fn dofs(&self, e: usize) -> [usize; 4] {
        let el = &self.elements[e];
        [2 * el.start, 2 * el.start + 1, 2 * el.end, 2 * el.end + 1]
    }

    pub fn assemble(&self) -> DMatrix<f64> {
        let n = 2 * self.positions.len();
        let mut k = DMatrix::zeros(n, n);
        for e in 0..self.elements.len() {
            let ke = self.element_matrix(e);
            let dofs = self.dofs(e);
            for (a, &ga) in dofs.iter().enumerate() {
                for (b, &gb) in dofs.iter().enumerate() {
                    k[(ga, gb)] += ke[(a, b)];
                }
            }
        }
        k
    }

    /// Factorizes the restrained stiffness matrix once for repeated solves.
    pub fn factorize(&self) -> Result<FactorizedModel<'_>> {
        let full = self.assemble();
        let free: Vec<usize> = (0..2 * self.positions.len())
            .filter(|&dof| !(dof % 2 == 0 && self.supported[dof / 2]))
            .collect();
        let kff = DMatrix::from_fn(free.len(), free.len(), |r, c| full[(free[r], free[c])]);
        let chol = kff.cholesky().ok_or(Error::Singular)?;
        Ok(FactorizedModel {
            model: self,
            full,
            free,
            chol,
        })
    }

    pub fn solve(&self, loads: &LoadCase) -> Result<ModelSolution> {
        self.factorize()?.solve(loads)
    }
}

pub struct FactorizedModel<'a> {
    model: &'a BeamModel,
    full: DMatrix<f64>,
    free: Vec<usize>,
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
}

impl FactorizedModel<'_> {
    pub fn solve(&self, loads: &LoadCase) -> Result<ModelSolution> {
        let model = self.model;
        let n = 2 * model.positions.len();
        // Equivalent nodal loads: applied nodal actions minus clamped-end reactions.
        let mut rhs = DVector::zeros(n);
        for (node, &(f, m)) in loads.nodal.iter().enumerate() {
            rhs[2 * node] += f;
            rhs[2 * node + 1] += m;
        }
        let mut fixed = Vec::with_capacity(model.elements.len());
        for e in 0..model.elements.len() {
            let fe = fixed_end_forces(loads.element_udl[e], model.element_length(e), 0.0)?;
            for (a, &g) in model.dofs(e).iter().enumerate() {
                rhs[g] -= fe[a];
            }
            fixed.push(fe);
        }
        let rf = DVector::from_iterator(self.free.len(), self.free.iter().map(|&g| rhs[g]));
        let uf = self.chol.solve(&rf);
        if uf.iter().any(|x| !x.is_finite()) {
            return Err(Error::Singular);
        }
        let mut u = DVector::zeros(n);
        for (k, &g) in self.free.iter().enumerate() {
            u[g] = uf[k];
        }
        let end_forces = (0..model.elements.len())
            .map(|e| {
                let dofs = model.dofs(e);
                let ue = Vector4::from_fn(|a, _| u[dofs[a]]);
                let f = model.element_matrix(e) * ue;
                [
                    f[0] + fixed[e][0],
                    f[1] + fixed[e][1],
                    f[2] + fixed[e][2],
                    f[3] + fixed[e][3],
                ]
            })
            .collect();
        let internal = &self.full * &u;
        let residual_forces: Vec<f64> = (0..n).map(|g| internal[g] - rhs[g]).collect();
        Ok(ModelSolution {
            displacements: u.iter().copied().collect(),
            end_forces,
            udl: loads.element_udl.clone(),
            lengths: (0..model.elements.len()).map(|e| model.element_length(e)).collect(),
            reactions: residual_forces,
            supported: model.supported.clone(),
            applied_vertical: loads.nodal.iter().map(|p| p.0).sum::<f64>()
                - loads
                    .element_udl
                    .iter()
                    .enumerate()
                    .map(|(e, w)| w * model.element_length(e))
                    .sum::<f64>(),
        })
    }
}

/// Displacements and element end forces of a solved [`BeamModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSolution {
    /// `[v₀, θ₀, v₁, θ₁, …]`.
    pub displacements: Vec<f64>,
    /// `[F₁, M₁, F₂, M₂]` acting on each element.
    pub end_forces: Vec<[f64; 4]>,
    udl: Vec<f64>,
    lengths: Vec<f64>,
    /// `K·u − f` per DOF; nonzero only at restrained DOFs.
    reactions: Vec<f64>,
    supported: Vec<bool>,
    applied_vertical: f64,
}

impl ModelSolution {
    pub fn deflection(&self, node: usize) -> f64 {
        self.displacements[2 * node]
    }

    pub fn rotation(&self, node: usize) -> f64 {
        self.displacements[2 * node + 1]
    }

    /// Support reaction at `node`, upward positive.
    pub fn reaction(&self, node: usize) -> f64 {
        if self.supported[node] {
            self.reactions[2 * node]
        } else {
            0.0
        }
    }

    /// Sagging-positive moment at fraction `xi` of element `e`.
    pub fn moment(&self, e: usize, xi: f64) -> f64 {
        let [f1, m1, _, _] = self.end_forces[e];
        let x = xi * self.lengths[e];
        -m1 + f1 * x - self.udl[e] * x * x / 2.0
    }

    /// Shear at fraction `xi` of element `e`.
    pub fn shear(&self, e: usize, xi: f64) -> f64 {
        let [f1, _, _, _] = self.end_forces[e];
        f1 - self.udl[e] * xi * self.lengths[e]
    }

    /// |ΣR + ΣP| / max(|ΣP|, ΣR scale) for vertical forces.
    pub fn equilibrium_residual(&self) -> f64 {
        let reactions: f64 = (0..self.supported.len()).map(|n| self.reaction(n)).sum();
        let scale = self.applied_vertical.abs().max(
            (0..self.supported.len())
                .map(|n| self.reaction(n).abs())
                .fold(0.0, f64::max),
        );
        if scale == 0.0 {
            0.0
        } else {
            (reactions + self.applied_vertical).abs() / scale
        }
    }

    /// Largest out-of-balance force at an unrestrained DOF.
    pub fn free_residual(&self) -> f64 {
        self.reactions
            .iter()
            .enumerate()
            .filter(|(g, _)| !(g % 2 == 0 && self.supported[g / 2]))
            .map(|(_, r)| r.abs())
            .fold(0.0, f64::max)
    }
}

/// Flexural rigidity EI (kN·m²) and shear rigidity G·A_z (kN) per member.
pub fn member_rigidities(system: &BeamSystem, material: &Material) -> Result<(Vec<f64>, Vec<f64>)> {
    let sections = system.assigned_sections()?;
    let ei = sections
        .iter()
        .map(|s| material.elastic_modulus * s.second_moment_major / 1000.0)
        .collect();
    let gaz = sections
        .iter()
        .map(|s| material.shear_modulus * s.shear_area_major / 1000.0)
        .collect();
    Ok((ei, gaz))
}

fn check_udl(system: &BeamSystem, udl: &[f64]) -> Result<()> {
    if udl.len() != system.member_count() {
        return Err(Error::Invalid(format!(
            "{} loads for {} members",
            udl.len(),
            system.member_count()
        )));
    }
    if system.member_count() == 0 {
        return Err(Error::Invalid("system has no members".into()));
    }
    Ok(())
}

/// Solution of a continuous beam under one UDL per member.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSolution {
    divisions: usize,
    inner: ModelSolution,
}

impl BeamSolution {
    pub fn member_count(&self) -> usize {
        self.inner.end_forces.len() / self.divisions
    }

    fn locate(&self, member: usize, xi: f64) -> (usize, f64) {
        let scaled = xi * self.divisions as f64;
        let k = (scaled.floor() as usize).min(self.divisions - 1);
        (member * self.divisions + k, scaled - k as f64)
    }

    /// Sagging-positive bending moment at fraction `xi` of `member`, kN·m.
    pub fn moment(&self, member: usize, xi: f64) -> f64 {
        let (e, local) = self.locate(member, xi);
        self.inner.moment(e, local)
    }

    /// Shear force at fraction `xi` of `member`, kN.
    pub fn shear(&self, member: usize, xi: f64) -> f64 {
        let (e, local) = self.locate(member, xi);
        self.inner.shear(e, local)
    }

    /// Rotation at support `node` (0..=m), rad.
    pub fn support_rotation(&self, node: usize) -> f64 {
        self.inner.rotation(node * self.divisions)
    }

    pub fn support_reaction(&self, node: usize) -> f64 {
        self.inner.reaction(node * self.divisions)
    }

    /// `[F₁, M₁, F₂, M₂]` for the whole member.
    pub fn member_end_forces(&self, member: usize) -> [f64; 4] {
        let first = self.inner.end_forces[member * self.divisions];
        let last = self.inner.end_forces[(member + 1) * self.divisions - 1];
        [first[0], first[1], last[2], last[3]]
    }

    pub fn equilibrium_residual(&self) -> f64 {
        self.inner.equilibrium_residual()
    }

    pub fn model_solution(&self) -> &ModelSolution {
        &self.inner
    }
}

/// Analyses `system` under `per_member_udl` (kN/m, downward) with one exact
/// element per member.
pub fn solve(system: &BeamSystem, material: &Material, per_member_udl: &[f64]) -> Result<BeamSolution> {
    solve_subdivided(system, material, per_member_udl, 1)
}

/// As [`solve`] with every member split into `divisions` elements.
pub fn solve_subdivided(
    system: &BeamSystem,
    material: &Material,
    per_member_udl: &[f64],
    divisions: usize,
) -> Result<BeamSolution> {
    check_udl(system, per_member_udl)?;
    let divisions = divisions.max(1);
    let (ei, gaz) = member_rigidities(system, material)?;
    let model = BeamModel::subdivided(&system.spans, &ei, &gaz, divisions);
    let mut loads = LoadCase::zeros(&model);
    for (i, &w) in per_member_udl.iter().enumerate() {
        for k in 0..divisions {
            loads.element_udl[i * divisions + k] = w;
        }
    }
    Ok(BeamSolution {
        divisions,
        inner: model.solve(&loads)?,
    })
}

/// The 11 equidistant stations of a design beam.
#[derive(Debug, Clone, PartialEq)]
pub struct StationGrid {
    pub design_beam: usize,
    pub stations: Vec<f64>,
}

impl StationGrid {
    pub fn new(design_beam: usize) -> Self {
        Self {
            design_beam,
            stations: standard_stations(),
        }
    }
}

pub fn standard_stations() -> Vec<f64> {
    (0..STATION_COUNT).map(|s| s as f64 / (STATION_COUNT - 1) as f64).collect()
}

/// Unit-UDL responses at the stations of one design beam.
///
/// `moment_unit[s][i]` is the moment at station `s` of the design beam when
/// member `i` alone carries 1 kN/m; by reciprocity this is the moment
/// influence line of that station integrated over member `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseTable {
    pub design_beam: usize,
    pub stations: Vec<f64>,
    pub moment_unit: Vec<Vec<f64>>,
    pub shear_unit: Vec<Vec<f64>>,
}

impl ResponseTable {
    pub fn member_count(&self) -> usize {
        self.moment_unit.first().map_or(0, Vec::len)
    }

    pub fn station_count(&self) -> usize {
        self.stations.len()
    }

    /// `station,member,M_unit,V_unit` rows.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["station", "member", "M_unit", "V_unit"])?;
        for (s, &xi) in self.stations.iter().enumerate() {
            for i in 0..self.member_count() {
                wtr.write_record([
                    xi.to_string(),
                    i.to_string(),
                    self.moment_unit[s][i].to_string(),
                    self.shear_unit[s][i].to_string(),
                ])?;
            }
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Response table of design beam `grid.design_beam`.
pub fn response_table(system: &BeamSystem, material: &Material, grid: &StationGrid) -> Result<ResponseTable> {
    let m = system.member_count();
    if grid.design_beam >= m {
        return Err(Error::IndexOutOfRange {
            index: grid.design_beam,
            len: m,
        });
    }
    let mut tables = unit_responses(system, material, &[grid.design_beam], &grid.stations)?;
    Ok(tables.remove(0))
}

/// Response tables for every member as design beam, sharing one factorization.
pub fn response_tables(system: &BeamSystem, material: &Material) -> Result<Vec<ResponseTable>> {
    let all: Vec<usize> = (0..system.member_count()).collect();
    unit_responses(system, material, &all, &standard_stations())
}

fn unit_responses(
    system: &BeamSystem,
    material: &Material,
    design_beams: &[usize],
    stations: &[f64],
) -> Result<Vec<ResponseTable>> {
    let m = system.member_count();
    if m == 0 {
        return Err(Error::Invalid("system has no members".into()));
    }
    let (ei, gaz) = member_rigidities(system, material)?;
    let model = BeamModel::continuous(&system.spans, &ei, &gaz);
    let factorized = model.factorize()?;
    let mut tables: Vec<ResponseTable> = design_beams
        .iter()
        .map(|&d| ResponseTable {
            design_beam: d,
            stations: stations.to_vec(),
            moment_unit: vec![vec![0.0; m]; stations.len()],
            shear_unit: vec![vec![0.0; m]; stations.len()],
        })
        .collect();
    for i in 0..m {
        let mut loads = LoadCase::zeros(&model);
        loads.element_udl[i] = 1.0;
        let sol = factorized.solve(&loads)?;
        for table in &mut tables {
            for (s, &xi) in stations.iter().enumerate() {
                table.moment_unit[s][i] = sol.moment(table.design_beam, xi);
                table.shear_unit[s][i] = sol.shear(table.design_beam, xi);
            }
        }
    }
    Ok(tables)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    Moment,
    Shear,
}

/// Signs of the per-member contributions at one station.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolaritySequence {
    pub design_beam: usize,
    pub station: usize,
    pub quantity: Quantity,
    pub signs: Vec<i8>,
}

impl PolaritySequence {
    pub fn negated(&self) -> Self {
        Self {
            signs: self.signs.iter().map(|s| -s).collect(),
            ..self.clone()
        }
    }
}

/// Relative tolerance below which a contribution counts as zero.
pub const POLARITY_ZERO_TOLERANCE: f64 = 1e-10;

pub fn polarity_sequence(table: &ResponseTable, station: usize, quantity: Quantity) -> PolaritySequence {
    let data = match quantity {
        Quantity::Moment => &table.moment_unit,
        Quantity::Shear => &table.shear_unit,
    };
    let scale = data
        .iter()
        .flatten()
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    let tol = POLARITY_ZERO_TOLERANCE * scale;
    let signs = data[station]
        .iter()
        .map(|&v| {
            if v.abs() <= tol {
                0
            } else if v > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect();
    PolaritySequence {
        design_beam: table.design_beam,
        station,
        quantity,
        signs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::SectionCatalog;
    use approx::assert_relative_eq;

    fn deep() -> crate::catalog::SteelSection {
        SectionCatalog::bundled().get("UKB 914x419x388").unwrap().clone()
    }

    #[test]
    fn euler_limit_entries() {
        let (e, i, l) = (210e9, 1e-4, 3.0);
        let k = element_stiffness(e, i, f64::INFINITY, l).unwrap();
        let ei = e * i;
        assert_relative_eq!(k[(0, 0)], 12.0 * ei / l.powi(3), max_relative = 1e-14);
        assert_relative_eq!(k[(0, 1)], 6.0 * ei / l.powi(2), max_relative = 1e-14);
        assert_relative_eq!(k[(1, 1)], 4.0 * ei / l, max_relative = 1e-14);
        assert_relative_eq!(k[(1, 3)], 2.0 * ei / l, max_relative = 1e-14);
        let huge = element_stiffness(e, i, 1e30, l).unwrap();
        assert_relative_eq!(huge[(1, 3)], 2.0 * ei / l, max_relative = 1e-12);
    }

    #[test]
    fn timoshenko_entry_matches_closed_form() {
        // Φ = 12EI/(GAz L²) = 0.15600..., k₁₁ = 12EI/((1+Φ)L³)
        let k = element_stiffness(210e9, 1e-4, 403.85e6, 2.0).unwrap();
        let phi = 12.0 * 210e9 * 1e-4 / (403.85e6 * 4.0);
        assert_relative_eq!(phi, 0.156, epsilon = 1e-3);
        assert_relative_eq!(k[(0, 0)], 2.725e7, max_relative = 1e-3);
        assert_relative_eq!(k, k.transpose(), epsilon = 1e-6);
    }

    #[test]
    fn rigid_body_modes_are_in_the_nullspace() {
        let l = 2.5;
        let k = element_stiffness(200e9, 3e-4, 5e8, l).unwrap();
        let translation = Vector4::new(1.0, 0.0, 1.0, 0.0);
        let rotation = Vector4::new(-l / 2.0, 1.0, l / 2.0, 1.0);
        assert!((k * translation).norm() <= 1e-6 * k.norm());
        assert!((k * rotation).norm() <= 1e-6 * k.norm());
    }

    #[test]
    fn rejects_non_positive_arguments() {
        assert!(element_stiffness(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(element_stiffness(1.0, 1.0, 1.0, -1.0).is_err());
        assert!(fixed_end_forces(1.0, 0.0, 0.3).is_err());
    }

    #[test]
    fn fixed_end_forces_are_symmetric() {
        for phi in [0.0, 0.5, 3.0] {
            let f = fixed_end_forces(10.0, 6.0, phi).unwrap();
            assert_eq!(f, [30.0, 30.0, 30.0, -30.0]);
        }
        assert_eq!(fixed_end_forces(0.0, 6.0, 1.0).unwrap(), [0.0; 4]);
    }

    #[test]
    fn single_span_is_determinate() {
        let sys = crate::model::BeamSystem::uniform(1, 6.0, 0.0, 0.0).with_section_everywhere(&deep());
        let sol = solve(&sys, &Material::s355(), &[1.0]).unwrap();
        assert_relative_eq!(sol.moment(0, 0.5), 4.5, epsilon = 1e-12);
        assert_relative_eq!(sol.shear(0, 0.0), 3.0, epsilon = 1e-12);
        assert_relative_eq!(sol.shear(0, 1.0), -3.0, epsilon = 1e-12);
        assert!(sol.equilibrium_residual() < 1e-12);
    }

    #[test]
    fn zero_loads_give_zero_response() {
        let sys = crate::model::BeamSystem::uniform(4, 5.0, 0.0, 0.0).with_section_everywhere(&deep());
        let sol = solve(&sys, &Material::s355(), &[0.0; 4]).unwrap();
        for i in 0..4 {
            assert_eq!(sol.moment(i, 0.3), 0.0);
            assert_eq!(sol.shear(i, 0.7), 0.0);
        }
    }

    #[test]
    fn missing_sections_are_an_error() {
        let sys = crate::model::BeamSystem::uniform(2, 5.0, 0.0, 0.0);
        assert!(matches!(
            solve(&sys, &Material::s355(), &[1.0, 1.0]),
            Err(Error::MissingSection { member: 0 })
        ));
    }

    #[test]
    fn response_rows_superpose_to_full_load() {
        let sys = crate::model::BeamSystem::new(vec![4.0, 7.0, 5.5, 6.0], vec![0.0; 4], vec![0.0; 4])
            .with_section_everywhere(&deep());
        let mat = Material::s355();
        let table = response_table(&sys, &mat, &StationGrid::new(1)).unwrap();
        let full = solve(&sys, &mat, &[1.0; 4]).unwrap();
        for (s, &xi) in table.stations.iter().enumerate() {
            let m: f64 = table.moment_unit[s].iter().sum();
            let v: f64 = table.shear_unit[s].iter().sum();
            assert_relative_eq!(m, full.moment(1, xi), epsilon = 1e-9);
            assert_relative_eq!(v, full.shear(1, xi), epsilon = 1e-9);
        }
    }

    #[test]
    fn single_span_polarity_is_positive() {
        let sys = crate::model::BeamSystem::uniform(1, 6.0, 0.0, 0.0).with_section_everywhere(&deep());
        let table = response_table(&sys, &Material::s355(), &StationGrid::new(0)).unwrap();
        assert_relative_eq!(table.moment_unit[5][0], 4.5, epsilon = 1e-12);
        assert_eq!(polarity_sequence(&table, 5, Quantity::Moment).signs, vec![1]);
        // support moments of a simply supported span are zero
        assert_eq!(polarity_sequence(&table, 0, Quantity::Moment).signs, vec![0]);
    }

    #[test]
    fn csv_dump_has_one_row_per_station_and_member() {
        let sys = crate::model::BeamSystem::uniform(3, 6.0, 0.0, 0.0).with_section_everywhere(&deep());
        let table = response_table(&sys, &Material::s355(), &StationGrid::new(1)).unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 11 * 3);
        assert!(text.starts_with("station,member,M_unit,V_unit"));
    }
}
