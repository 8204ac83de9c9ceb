//! Reconstruction of a flat torsionless submanifold from its fundamental forms.
//!
//! Ambient coordinates are chosen so the scalar product is
//! `G = blockdiag(η_{ij}, μ_{αβ})` and the frame at the base point is the
//! identity basis. The frame equations in flat coordinates are
//!
//! ```text
//! ∂T_i/∂u^j = Σ_{α,β} ω_{β,ij} μ^{βα} n_α
//! ∂n_α/∂u^i = −Σ_{j,k} ω_{α,ij} η^{jk} T_k
//! ∂r/∂u^i   = T_i
//! ```
//!
//! They are integrated with RK4 along axis-aligned staircases from the base
//! point. Whether the result depends on the staircase order is exactly the
//! integrability question, so it is measured rather than assumed.

use crate::error::{check_dim, GeomError, Result};
use crate::lax::segment_steps;
use crate::linalg::{max_abs_diff, Matrix, MultiIndexIter};
use crate::potential::{HessianField, MetricMatrix, ProblemSpec};
use crate::scalar::Rational;

/// Default RK4 substeps per grid cell.
pub const DEFAULT_SUBSTEPS: usize = 32;
/// Default step of the finite-difference stencils used by the verifiers.
pub const DEFAULT_FD_STEP: f64 = 1e-3;

/// Position, tangents `T_i = r_{u^i}` and normals `n_α`, all in ambient coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub position: Vec<f64>,
    pub tangents: Vec<Vec<f64>>,
    pub normals: Vec<Vec<f64>>,
}

impl Frame {
    fn flatten(&self) -> Vec<f64> {
        let mut v = self.position.clone();
        for t in self.tangents.iter().chain(&self.normals) {
            v.extend_from_slice(t);
        }
        v
    }

    fn unflatten(v: &[f64], n: usize, l: usize) -> Self {
        let d = n + l;
        let chunk = |k: usize| v[(k + 1) * d..(k + 2) * d].to_vec();
        Self {
            position: v[..d].to_vec(),
            tangents: (0..n).map(chunk).collect(),
            normals: (n..n + l).map(chunk).collect(),
        }
    }

    /// Applies the linear map `q` to every vector and then translates the position.
    pub fn transformed(&self, q: &Matrix<f64>, shift: &[f64]) -> Self {
        let apply = |v: &Vec<f64>| q.mul_vec(v).expect("ambient dimension");
        Self {
            position: apply(&self.position).iter().zip(shift).map(|(a, b)| a + b).collect(),
            tangents: self.tangents.iter().map(apply).collect(),
            normals: self.normals.iter().map(apply).collect(),
        }
    }

    /// `|·|_∞` distance over position and all frame vectors.
    pub fn distance(&self, other: &Self) -> f64 {
        max_abs_diff(&self.flatten(), &other.flatten())
    }
}

/// The pseudo-Euclidean scalar product of the ambient space.
#[derive(Clone, Debug, PartialEq)]
pub struct AmbientForm {
    exact: Matrix<Rational>,
    g: Matrix<f64>,
    n: usize,
}

impl AmbientForm {
    /// `blockdiag(η_{ij}, μ_{αβ})` from the covariant metrics.
    pub fn new(eta: &MetricMatrix, mu: &MetricMatrix) -> Self {
        let (n, l) = (eta.dim(), mu.dim());
        let exact = Matrix::from_fn(n + l, n + l, |a, b| match (a < n, b < n) {
            (true, true) => eta.get(a, b).clone(),
            (false, false) => mu.get(a - n, b - n).clone(),
            _ => Rational::from_integer(0.into()),
        });
        let g = exact.to_f64();
        Self { exact, g, n }
    }

    pub fn dim(&self) -> usize {
        self.g.rows()
    }

    pub fn matrix(&self) -> &Matrix<f64> {
        &self.g
    }

    pub fn exact(&self) -> &Matrix<Rational> {
        &self.exact
    }

    pub fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for i in 0..d {
            if a[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                acc += a[i] * self.g[(i, j)] * b[j];
            }
        }
        acc
    }

    /// Gram matrix of `(T_1, …, T_N, n_1, …, n_L)`.
    pub fn gram(&self, frame: &Frame) -> Matrix<f64> {
        let vecs: Vec<&Vec<f64>> = frame.tangents.iter().chain(&frame.normals).collect();
        Matrix::from_fn(vecs.len(), vecs.len(), |i, j| self.dot(vecs[i], vecs[j]))
    }

    /// `max |Gram(frame) − G|`.
    pub fn gram_drift(&self, frame: &Frame) -> f64 {
        self.gram(frame).sub(&self.g).expect("frame size").max_abs()
    }

    /// Signature `(p, q)` of the form.
    pub fn signature(&self) -> (usize, usize) {
        let (p, q, _) = self.exact.inertia().expect("symmetric by construction");
        (p, q)
    }

    fn tangent_block(&self) -> Matrix<f64> {
        Matrix::from_fn(self.n, self.n, |i, j| self.g[(i, j)])
    }
}

/// Identity frame at the origin and `G = blockdiag(η, μ)`; `eta`, `mu` are covariant.
pub fn initial_frame(eta: &MetricMatrix, mu: &MetricMatrix) -> (Frame, AmbientForm) {
    let (n, l) = (eta.dim(), mu.dim());
    let d = n + l;
    let unit = |k: usize| {
        let mut v = vec![0.0; d];
        v[k] = 1.0;
        v
    };
    let frame = Frame {
        position: vec![0.0; d],
        tangents: (0..n).map(unit).collect(),
        normals: (n..d).map(unit).collect(),
    };
    (frame, AmbientForm::new(eta, mu))
}

/// Right-hand side of the frame equations.
#[derive(Clone, Debug)]
pub struct FrameSystem {
    field: HessianField,
    eta_inv: Matrix<f64>,
    mu_inv: Matrix<f64>,
    n: usize,
    l: usize,
}

impl FrameSystem {
    pub fn from_spec(spec: &ProblemSpec) -> Result<Self> {
        Ok(Self {
            field: HessianField::new(&spec.psi(), spec.n())?,
            eta_inv: spec.eta_inv().to_f64(),
            mu_inv: spec.mu_inv().to_f64(),
            n: spec.n(),
            l: spec.l(),
        })
    }

    pub fn second_forms(&self, u: &[f64]) -> Vec<Vec<Vec<f64>>> {
        self.field.hessians(u)
    }

    /// `∂(frame)/∂u^axis` at `u`, flattened like [`Frame::flatten`].
    fn derivative(&self, x: &[f64], u: &[f64], axis: usize) -> Vec<f64> {
        let (n, l) = (self.n, self.l);
        let d = n + l;
        let omega = self.field.hessians(u);
        let tangent = |i: usize| &x[(i + 1) * d..(i + 2) * d];
        let normal = |a: usize| &x[(n + a + 1) * d..(n + a + 2) * d];
        let mut out = vec![0.0; x.len()];
        out[..d].copy_from_slice(tangent(axis));
        for i in 0..n {
            let slot = &mut out[(i + 1) * d..(i + 2) * d];
            for a in 0..l {
                // Σ_β ω_{β,i axis} μ^{βα}
                let c: f64 = (0..l).map(|b| omega[b][i][axis] * self.mu_inv[(b, a)]).sum();
                if c != 0.0 {
                    for (s, v) in slot.iter_mut().zip(normal(a)) {
                        *s += c * v;
                    }
                }
            }
        }
        for a in 0..l {
            let slot = &mut out[(n + a + 1) * d..(n + a + 2) * d];
            for k in 0..n {
                // −Σ_j ω_{α,axis j} η^{jk}
                let c: f64 = -(0..n).map(|j| omega[a][axis][j] * self.eta_inv[(j, k)]).sum::<f64>();
                if c != 0.0 {
                    for (s, v) in slot.iter_mut().zip(tangent(k)) {
                        *s += c * v;
                    }
                }
            }
        }
        out
    }

    /// Moves `frame` from `u` to `u + length·e_axis` with RK4 steps of at most `h`.
    pub fn advance(&self, frame: &Frame, u: &[f64], axis: usize, length: f64, h: f64) -> Frame {
        if length == 0.0 {
            return frame.clone();
        }
        let sign = length.signum();
        let mut x = frame.flatten();
        let mut pos = u.to_vec();
        let at = |p: &[f64], s: f64| {
            let mut q = p.to_vec();
            q[axis] += s;
            q
        };
        for (offset, step) in segment_steps(length.abs(), h) {
            pos[axis] = u[axis] + sign * offset;
            let hs = sign * step;
            let f = |s: f64, y: &[f64]| self.derivative(y, &at(&pos, s), axis);
            let axpy = |y: &[f64], k: &[f64], c: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + c * b).collect() };
            let k1 = f(0.0, &x);
            let k2 = f(0.5 * hs, &axpy(&x, &k1, 0.5 * hs));
            let k3 = f(0.5 * hs, &axpy(&x, &k2, 0.5 * hs));
            let k4 = f(hs, &axpy(&x, &k3, hs));
            for i in 0..x.len() {
                x[i] += hs / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        Frame::unflatten(&x, self.n, self.l)
    }
}

/// Sweep configuration for [`integrate_frame_with`].
#[derive(Clone, Debug)]
pub struct SweepOptions {
    /// Axis order of the staircase paths; `[0, 1, …]` moves along `u¹` first.
    pub order: Vec<usize>,
    pub substeps: usize,
    /// Frame at the base point; `None` means the identity frame.
    pub initial: Option<Frame>,
}

impl SweepOptions {
    pub fn ascending(n: usize) -> Self {
        Self {
            order: (0..n).collect(),
            substeps: DEFAULT_SUBSTEPS,
            initial: None,
        }
    }

    pub fn descending(n: usize) -> Self {
        Self {
            order: (0..n).rev().collect(),
            ..Self::ascending(n)
        }
    }
}

/// Frames at every node of the problem grid.
#[derive(Clone, Debug)]
pub struct ImmersionGrid {
    coords: Vec<Vec<f64>>,
    frames: Vec<Frame>,
    system: FrameSystem,
    form: AmbientForm,
    step: f64,
}

impl ImmersionGrid {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.coords.iter().map(Vec::len).collect()
    }

    pub fn axis_coords(&self, axis: usize) -> &[f64] {
        &self.coords[axis]
    }

    pub fn ambient_form(&self) -> &AmbientForm {
        &self.form
    }

    pub fn system(&self) -> &FrameSystem {
        &self.system
    }

    pub fn frame(&self, idx: &[usize]) -> &Frame {
        &self.frames[self.linear(idx)]
    }

    /// `(u, frame)` for every node in row-major order.
    pub fn nodes(&self) -> impl Iterator<Item = (Vec<f64>, &Frame)> + '_ {
        MultiIndexIter::new(&self.shape()).map(move |idx| {
            let u = idx.iter().enumerate().map(|(a, &i)| self.coords[a][i]).collect();
            (u, &self.frames[self.linear(&idx)])
        })
    }

    fn linear(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.coords).fold(0, |acc, (&i, c)| acc * c.len() + i)
    }

    /// Largest `|frame_a − frame_b|_∞` over all nodes of two grids of the same shape.
    pub fn max_distance(&self, other: &Self) -> f64 {
        self.frames
            .iter()
            .zip(&other.frames)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    }

    /// Gram drift at every node, row-major.
    pub fn gram_drift(&self) -> Vec<f64> {
        self.frames.iter().map(|f| self.form.gram_drift(f)).collect()
    }
}

/// Integrates the frame equations over the problem grid with the default sweep.
pub fn integrate_frame(spec: &ProblemSpec) -> Result<ImmersionGrid> {
    integrate_frame_with(spec, &SweepOptions::ascending(spec.n()))
}

pub fn integrate_frame_with(spec: &ProblemSpec, opts: &SweepOptions) -> Result<ImmersionGrid> {
    let n = spec.n();
    let mut sorted = opts.order.clone();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return Err(GeomError::Invalid(format!("sweep order {:?} is not a permutation of 0..{n}", opts.order)));
    }
    if opts.substeps == 0 {
        return Err(GeomError::Invalid("substeps must be positive".into()));
    }
    let system = FrameSystem::from_spec(spec)?;
    let (identity, form) = initial_frame(spec.eta(), spec.mu());
    let start = opts.initial.clone().unwrap_or(identity);
    check_dim("initial frame", n + spec.l(), start.position.len())?;
    let coords: Vec<Vec<f64>> = (0..n)
        .map(|a| spec.domain.axis_coords(a).iter().map(crate::scalar::Scalar::to_f64).collect())
        .collect();
    let spacing = crate::scalar::Scalar::to_f64(&spec.domain.spacing());
    let step = if spacing > 0.0 {
        spacing / opts.substeps as f64
    } else {
        crate::scalar::Scalar::to_f64(&spec.domain.half_width).max(1.0) / opts.substeps as f64
    };

    // (position in parameter space, node index per axis, frame)
    let mut front: Vec<(Vec<f64>, Vec<usize>, Frame)> = vec![(spec.domain.base_f64(), vec![0; n], start)];
    for &axis in &opts.order {
        let targets = &coords[axis];
        let mut next = Vec::with_capacity(front.len() * targets.len());
        for (u, idx, frame) in front {
            for (t, f) in sweep_line(&system, &frame, &u, axis, targets, step) {
                let mut u2 = u.clone();
                u2[axis] = targets[t];
                let mut idx2 = idx.clone();
                idx2[axis] = t;
                next.push((u2, idx2, f));
            }
        }
        front = next;
    }
    let shape: Vec<usize> = coords.iter().map(Vec::len).collect();
    let mut frames: Vec<Option<Frame>> = vec![None; shape.iter().product()];
    for (_, idx, f) in front {
        let lin = idx.iter().zip(&shape).fold(0, |acc, (&i, &s)| acc * s + i);
        frames[lin] = Some(f);
    }
    Ok(ImmersionGrid {
        coords,
        frames: frames.into_iter().map(|f| f.expect("every node is reached")).collect(),
        system,
        form,
        step,
    })
}

/// Frames at each target coordinate along one axis, integrating outward from `u[axis]`.
fn sweep_line(system: &FrameSystem, frame: &Frame, u: &[f64], axis: usize, targets: &[f64], h: f64) -> Vec<(usize, Frame)> {
    let s0 = u[axis];
    let mut out = Vec::with_capacity(targets.len());
    let mut up: Vec<usize> = (0..targets.len()).filter(|&t| targets[t] >= s0).collect();
    let mut down: Vec<usize> = (0..targets.len()).filter(|&t| targets[t] < s0).collect();
    up.sort_by(|&a, &b| targets[a].total_cmp(&targets[b]));
    down.sort_by(|&a, &b| targets[b].total_cmp(&targets[a]));
    for list in [up, down] {
        let mut cur = frame.clone();
        let mut pos = u.to_vec();
        for t in list {
            cur = system.advance(&cur, &pos, axis, targets[t] - pos[axis], h);
            pos[axis] = targets[t];
            out.push((t, cur.clone()));
        }
    }
    out
}

/// `max |(T_i, T_j)_G − η_{ij}|` over nodes.
pub fn verify_induced_metric(grid: &ImmersionGrid, form: &AmbientForm) -> f64 {
    let eta = form.tangent_block();
    let n = grid.dim();
    grid.frames
        .iter()
        .map(|f| {
            let mut worst: f64 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    worst = worst.max((form.dot(&f.tangents[i], &f.tangents[j]) - eta[(i, j)]).abs());
                }
            }
            worst
        })
        .fold(0.0, f64::max)
}

fn check_fd_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(GeomError::Invalid(format!("finite-difference step must be positive, got {h}")))
    }
}

/// Frames at `u ± h e_axis`, transported from the node frame.
fn stencil(grid: &ImmersionGrid, u: &[f64], frame: &Frame, axis: usize, h: f64) -> (Frame, Frame) {
    let sub = h.min(grid.step);
    (
        grid.system.advance(frame, u, axis, h, sub),
        grid.system.advance(frame, u, axis, -h, sub),
    )
}

/// Max over nodes of `|(n_α, r_{u^i u^j})_G − ∂²ψ_α/∂u^i∂u^j|`, where
/// `r_{u^i u^j}` is the central difference `(T_i(u + h e_j) − T_i(u − h e_j)) / 2h`
/// (truncation error `O(h²)`).
pub fn verify_second_forms(grid: &ImmersionGrid, form: &AmbientForm, h: f64) -> Result<f64> {
    check_fd_step(h)?;
    let n = grid.dim();
    let mut worst: f64 = 0.0;
    for (u, frame) in grid.nodes() {
        let omega = grid.system.second_forms(&u);
        for j in 0..n {
            let (plus, minus) = stencil(grid, &u, frame, j, h);
            for i in 0..n {
                let d2r: Vec<f64> = plus.tangents[i]
                    .iter()
                    .zip(&minus.tangents[i])
                    .map(|(a, b)| (a - b) / (2.0 * h))
                    .collect();
                for (a, na) in frame.normals.iter().enumerate() {
                    worst = worst.max((form.dot(na, &d2r) - omega[a][i][j]).abs());
                }
            }
        }
    }
    Ok(worst)
}

/// Max over nodes, axes `i` and pairs `α ≠ β` of `|(∂n_α/∂u^i, n_β)_G|`, with the
/// derivative taken by central differences of step `h`.
pub fn verify_torsion(grid: &ImmersionGrid, form: &AmbientForm, h: f64) -> Result<f64> {
    check_fd_step(h)?;
    let mut worst: f64 = 0.0;
    for (u, frame) in grid.nodes() {
        let l = frame.normals.len();
        if l < 2 {
            continue;
        }
        for i in 0..grid.dim() {
            let (plus, minus) = stencil(grid, &u, frame, i, h);
            for a in 0..l {
                let dn: Vec<f64> = plus.normals[a]
                    .iter()
                    .zip(&minus.normals[a])
                    .map(|(x, y)| (x - y) / (2.0 * h))
                    .collect();
                for b in (0..l).filter(|&b| b != a) {
                    worst = worst.max(form.dot(&dn, &frame.normals[b]).abs());
                }
            }
        }
    }
    Ok(worst)
}

/// Largest frame disagreement between the ascending and descending sweeps.
pub fn path_dependence(spec: &ProblemSpec, substeps: usize) -> Result<f64> {
    let n = spec.n();
    let mut a = SweepOptions::ascending(n);
    let mut b = SweepOptions::descending(n);
    a.substeps = substeps;
    b.substeps = substeps;
    Ok(integrate_frame_with(spec, &a)?.max_distance(&integrate_frame_with(spec, &b)?))
}

/// CSV point cloud: `u1..uN, r1..r{N+L}`, optionally `gram_drift` and the frame vectors.
pub fn write_point_cloud<W: std::io::Write + ?Sized>(
    grid: &ImmersionGrid,
    out: &mut W,
    with_drift: bool,
    with_frames: bool,
) -> std::io::Result<()> {
    let n = grid.dim();
    let d = grid.form.dim();
    let mut header: Vec<String> = (1..=n).map(|i| format!("u{i}")).collect();
    header.extend((1..=d).map(|i| format!("r{i}")));
    if with_drift {
        header.push("gram_drift".into());
    }
    if with_frames {
        for i in 1..=n {
            header.extend((1..=d).map(|c| format!("T{i}_{c}")));
        }
        for a in 1..=d - n {
            header.extend((1..=d).map(|c| format!("n{a}_{c}")));
        }
    }
    writeln!(out, "{}", header.join(","))?;
    for (u, f) in grid.nodes() {
        let mut row: Vec<String> = u.iter().chain(&f.position).map(|x| crate::report::format_f64(*x)).collect();
        if with_drift {
            row.push(crate::report::format_f64(grid.form.gram_drift(f)));
        }
        if with_frames {
            for v in f.tangents.iter().chain(&f.normals) {
                row.extend(v.iter().map(|x| crate::report::format_f64(*x)));
            }
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{Domain, MuSpec, PolynomialPotential, Potentials, Tolerances};
    use crate::scalar::rational;

    fn circle(kappa: (i64, i64), grid: usize) -> ProblemSpec {
        ProblemSpec::new(
            MetricMatrix::identity(1),
            MuSpec::Matrix(MetricMatrix::identity(1)),
            Potentials::Psi(vec![PolynomialPotential::monomial(vec![2], rational(kappa.0, 2 * kappa.1))]),
            Domain {
                base: vec![rational(0, 1)],
                half_width: rational(157, 200),
                grid,
            },
            Tolerances::default(),
        )
        .unwrap()
    }

    #[test]
    fn initial_frame_gram_is_exact() {
        let (f, g) = initial_frame(&MetricMatrix::antidiagonal(3), &MetricMatrix::antidiagonal(3));
        assert_eq!(g.gram(&f), g.matrix().clone());
        assert_eq!(g.signature(), (4, 2));
        let (f, g) = initial_frame(&MetricMatrix::identity(2), &MetricMatrix::identity(1));
        assert_eq!(g.gram(&f), Matrix::identity(3));
    }

    #[test]
    fn zero_potentials_give_flat_plane() {
        let spec = ProblemSpec::new(
            MetricMatrix::identity(2),
            MuSpec::Matrix(MetricMatrix::identity(2)),
            Potentials::Psi(vec![PolynomialPotential::zero(2); 2]),
            Domain::centered(2),
            Tolerances::default(),
        )
        .unwrap();
        let grid = integrate_frame(&spec).unwrap();
        for (u, f) in grid.nodes() {
            assert_eq!(f.position, vec![u[0], u[1], 0.0, 0.0]);
            assert_eq!(f.tangents, vec![vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0, 0.0]]);
        }
        let g = grid.ambient_form().clone();
        assert_eq!(verify_induced_metric(&grid, &g), 0.0);
        assert!(verify_second_forms(&grid, &g, DEFAULT_FD_STEP).unwrap() < 1e-12);
        assert!(verify_torsion(&grid, &g, DEFAULT_FD_STEP).unwrap() < 1e-12);
    }

    #[test]
    fn unit_curvature_traces_a_circle() {
        let spec = circle((1, 1), 9);
        let grid = integrate_frame(&spec).unwrap();
        for (u, f) in grid.nodes() {
            let expect = [u[0].sin(), 1.0 - u[0].cos()];
            assert!(max_abs_diff(&f.position, &expect) < 1e-8, "{u:?}");
        }
        let g = grid.ambient_form().clone();
        assert!(verify_induced_metric(&grid, &g) < 1e-8);
        assert!(verify_second_forms(&grid, &g, DEFAULT_FD_STEP).unwrap() < 1e-4);
        assert_eq!(verify_torsion(&grid, &g, DEFAULT_FD_STEP).unwrap(), 0.0);
    }

    #[test]
    fn curvature_two_halves_the_radius() {
        let spec = circle((2, 1), 5);
        let grid = integrate_frame(&spec).unwrap();
        for (_, f) in grid.nodes() {
            let r = (f.position[0].powi(2) + (f.position[1] - 0.5).powi(2)).sqrt();
            assert!((r - 0.5).abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_bad_options() {
        let spec = circle((1, 1), 3);
        let mut o = SweepOptions::ascending(1);
        o.order = vec![1];
        assert!(integrate_frame_with(&spec, &o).is_err());
        let mut o = SweepOptions::ascending(1);
        o.substeps = 0;
        assert!(integrate_frame_with(&spec, &o).is_err());
        let grid = integrate_frame(&spec).unwrap();
        assert!(verify_second_forms(&grid, grid.ambient_form(), 0.0).is_err());
    }

    #[test]
    fn point_cloud_layout() {
        let spec = circle((1, 1), 3);
        let grid = integrate_frame(&spec).unwrap();
        let mut buf = Vec::new();
        write_point_cloud(&grid, &mut buf, true, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "u1,r1,r2,gram_drift,T1_1,T1_2,n1_1,n1_2");
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[2].split(',').count(), 8);
    }
}
