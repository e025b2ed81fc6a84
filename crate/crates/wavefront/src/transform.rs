//! Short-time Fourier transform, its adjoint, and point queries.
//!
//! Convention: `V_g u(x, xi) = k_g sum_j u_j conj(g(y_j - x)) exp(-i xi y_j) dy`
//! with `k_g = (2 pi)^{-d/2} / ||g||`. Window offsets wrap around the
//! periodic grid.

use std::f64::consts::PI;
use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::CenteredDft;
use crate::grid::GridSpec;
use crate::signal::SampledSignal;
use crate::window::{Window, WindowKind};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// STFT on the `n x n` lattice `(x_i, xi_k)`, row-major in `x`.
#[derive(Debug, Clone)]
pub struct StftField {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
    pub window: Window,
    pub k_g: f64,
}

impl StftField {
    pub fn n(&self) -> usize {
        self.grid.n
    }

    pub fn at(&self, i: usize, k: usize) -> Complex64 {
        self.values[i * self.grid.n + k]
    }

    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `sum |V|^2 dx dxi`.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.delta() * self.grid.dxi()
    }

    /// Lattice coordinates of cell `(i, k)`.
    pub fn point(&self, i: usize, k: usize) -> (f64, f64) {
        (self.grid.y(i), self.grid.xi(k))
    }

    /// Pointwise multiplication by a symbol sampled on the lattice.
    pub fn multiply(&self, a: &[f64]) -> StftField {
        let values = self.values.iter().zip(a).map(|(v, &s)| v * s).collect();
        StftField { values, ..self.clone() }
    }

    pub fn write_binary<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(b"WFFIELD1")?;
        w.write_all(&(self.grid.d as u32).to_le_bytes())?;
        w.write_all(&(self.grid.n as u32).to_le_bytes())?;
        w.write_all(&self.grid.l.to_le_bytes())?;
        let (code, sigma) = match self.window.kind {
            WindowKind::StandardGaussian => (0u32, 1.0),
            WindowKind::DilatedGaussian { sigma } => (1, sigma),
            WindowKind::Custom => (2, 0.0),
        };
        w.write_all(&code.to_le_bytes())?;
        w.write_all(&f64::to_le_bytes(sigma))?;
        for v in &self.values {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }
}

/// Header and values of a binary field dump.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDump {
    pub grid: GridSpec,
    pub window: WindowKind,
    pub values: Vec<Complex64>,
}

pub fn read_field_dump<R: Read>(mut r: R) -> Result<FieldDump> {
    let io = |e: std::io::Error| Error::Io(e.to_string());
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(io)?;
    if &magic != b"WFFIELD1" {
        return Err(Error::Schema { path: "header".into(), message: "bad magic".into() });
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4).map_err(io)?;
    let d = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b4).map_err(io)?;
    let n = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b8).map_err(io)?;
    let l = f64::from_le_bytes(b8);
    r.read_exact(&mut b4).map_err(io)?;
    let code = u32::from_le_bytes(b4);
    r.read_exact(&mut b8).map_err(io)?;
    let sigma = f64::from_le_bytes(b8);
    let grid = GridSpec::new(l, n, d)?;
    let window = match code {
        0 => WindowKind::StandardGaussian,
        1 => WindowKind::DilatedGaussian { sigma },
        _ => WindowKind::Custom,
    };
    let mut values = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        r.read_exact(&mut b8).map_err(io)?;
        let re = f64::from_le_bytes(b8);
        r.read_exact(&mut b8).map_err(io)?;
        values.push(Complex64::new(re, f64::from_le_bytes(b8)));
    }
    Ok(FieldDump { grid, window, values })
}

/// FFT-based STFT on the full lattice (d = 1).
pub fn stft_field(u: &SampledSignal, g: &Window) -> Result<StftField> {
    u.grid.check_same(&g.grid)?;
    if u.grid.d != 1 {
        return Err(Error::param("d", "full fields are only materialized for d = 1; use stft_direct"));
    }
    let grid = u.grid;
    let n = grid.n;
    let k_g = g.k_g();
    let scale = k_g * grid.delta();
    let dft = CenteredDft::new(n);
    let wconj: Vec<Complex64> = g.samples.iter().map(|w| w.conj()).collect();
    let mut values = vec![ZERO; n * n];
    values.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        // g(y_j - x_i) sits at window index j - i + n/2 (mod n)
        for (j, v) in row.iter_mut().enumerate() {
            *v = u.samples[j] * wconj[(j + n + n / 2 - i) % n];
        }
        dft.forward(row);
        for v in row.iter_mut() {
            *v *= scale;
        }
    });
    Ok(StftField { grid, values, window: g.clone(), k_g })
}

/// Standard-window field.
pub fn stft(u: &SampledSignal) -> Result<StftField> {
    stft_field(u, &Window::standard(u.grid))
}

/// Plain quadrature of the STFT at arbitrary points `(x..., xi...)`.
pub fn stft_direct(u: &SampledSignal, g: &Window, points: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    u.grid.check_same(&g.grid)?;
    let d = u.grid.d;
    if let Some(p) = points.iter().find(|p| p.len() != 2 * d || p.iter().any(|v| !v.is_finite())) {
        return Err(Error::param("points", format!("bad query point {p:?}")));
    }
    let k = g.k_g() * u.grid.delta().powi(d as i32);
    points
        .par_iter()
        .map(|p| match d {
            1 => direct_1d(u, g, p[0], p[1]).map(|v| v * k),
            _ => direct_2d(u, g, [p[0], p[1]], [p[2], p[3]]).map(|v| v * k),
        })
        .collect()
}

fn direct_1d(u: &SampledSignal, g: &Window, x: f64, xi: f64) -> Result<Complex64> {
    let grid = u.grid;
    let mut acc = ZERO;
    for (j, &uj) in u.samples.iter().enumerate() {
        let y = grid.y(j);
        let w = g.eval(&[y - x])?;
        acc += uj * w.conj() * Complex64::from_polar(1.0, -xi * y);
    }
    Ok(acc)
}

/// Offsets `j` with `|wrap(y_j - x)| <= r`, or all indices.
fn window_indices(grid: &GridSpec, x: f64, r: Option<f64>) -> Vec<usize> {
    match r {
        Some(r) if r < grid.l => (0..grid.n).filter(|&j| grid.wrap(grid.y(j) - x).abs() <= r).collect(),
        _ => (0..grid.n).collect(),
    }
}

fn direct_2d(u: &SampledSignal, g: &Window, x: [f64; 2], xi: [f64; 2]) -> Result<Complex64> {
    let grid = u.grid;
    let n = grid.n;
    let r = g.support_radius();
    let rows = window_indices(&grid, x[0], r);
    let cols = window_indices(&grid, x[1], r);
    let col_phase: Vec<Complex64> = cols.iter().map(|&c| Complex64::from_polar(1.0, -xi[1] * grid.y(c))).collect();
    let mut acc = ZERO;
    if g.kind.sigma().is_some() {
        // Gaussian windows factor over coordinates
        let col_w: Vec<Complex64> = cols
            .iter()
            .zip(&col_phase)
            .map(|(&b, ph)| Ok(g.eval(&[0.0, grid.y(b) - x[1]])?.conj() * ph))
            .collect::<Result<_>>()?;
        let w0 = g.eval(&[0.0, 0.0])?.re;
        for &a in &rows {
            let ya = grid.y(a);
            let wa = g.eval(&[ya - x[0], 0.0])?.re / w0;
            let row = &u.samples[a * n..(a + 1) * n];
            let racc: Complex64 = cols.iter().zip(&col_w).map(|(&b, w)| row[b] * w).sum();
            acc += racc * wa * Complex64::from_polar(1.0, -xi[0] * ya);
        }
        return Ok(acc);
    }
    for &a in &rows {
        let ya = grid.y(a);
        let pa = Complex64::from_polar(1.0, -xi[0] * ya);
        let mut racc = ZERO;
        for (ci, &b) in cols.iter().enumerate() {
            let w = g.eval(&[ya - x[0], grid.y(b) - x[1]])?;
            racc += u.samples[a * n + b] * w.conj() * col_phase[ci];
        }
        acc += racc * pa;
    }
    Ok(acc)
}

/// Adjoint synthesis `V* F(y) = k_g sum F(x, xi) g(y - x) exp(i xi y) dx dxi`.
pub fn stft_adjoint(f: &StftField) -> SampledSignal {
    let grid = f.grid;
    let n = grid.n;
    let dft = CenteredDft::new(n);
    let g = &f.window.samples;
    let scale = f.k_g * grid.delta() * grid.dxi();
    let mut rows = f.values.clone();
    rows.par_chunks_mut(n).for_each(|row| dft.backward(row));
    // fixed summation order over i keeps the result bitwise reproducible
    let acc: Vec<Complex64> =
        (0..n).into_par_iter().map(|j| (0..n).map(|i| g[(j + n + n / 2 - i) % n] * rows[i * n + j]).sum()).collect();
    let samples = acc.into_iter().map(|v| v * scale).collect();
    SampledSignal { grid, samples, label: "adjoint".into(), provenance: Vec::new() }
}

/// `e^{|x|^2/2} V_psi u(x, xi)` at a lattice point.
pub fn bargmann_view(f: &StftField, x: f64, xi: f64) -> Result<Complex64> {
    if f.window.kind != WindowKind::StandardGaussian {
        return Err(Error::WindowKind("the Bargmann view needs the standard Gaussian window".into()));
    }
    let i = f.grid.lattice_index(x).ok_or(Error::OffLattice(x, xi))?;
    let k = f.grid.freq_index(xi).ok_or(Error::OffLattice(x, xi))?;
    Ok(f.at(i, k) * (x * x / 2.0).exp())
}

/// `| sum |V|^2 dx dxi - ||u||^2 | / ||u||^2`.
pub fn parseval_check(u: &SampledSignal, g: &Window) -> Result<f64> {
    let norm2 = u.l2_norm().powi(2);
    if norm2 == 0.0 {
        return Err(Error::DegenerateNorm);
    }
    let f = stft_field(u, g)?;
    Ok((f.energy() - norm2).abs() / norm2)
}

/// `(2 pi)^{-1/2}`, the STFT constant for a unit window in d = 1.
pub fn k_unit() -> f64 {
    (2.0 * PI).powf(-0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    fn psi(grid: GridSpec) -> SampledSignal {
        let w = Window::standard(grid);
        SampledSignal::new(grid, w.samples.clone(), "psi").unwrap()
    }

    #[test]
    fn closed_form_at_origin() {
        let g = make_grid(16.0, 512, 1).unwrap();
        let f = stft(&psi(g)).unwrap();
        assert!((f.at(256, 256).norm() - 0.3989422804014327).abs() < 1e-10);
        let one = SampledSignal::new(g, vec![Complex64::new(1.0, 0.0); 512], "1").unwrap();
        let f1 = stft(&one).unwrap();
        assert!((f1.at(256, 256).norm() - 0.7511255444649425).abs() < 1e-10);
    }

    #[test]
    fn adjoint_inverts() {
        let g = make_grid(16.0, 256, 1).unwrap();
        let u = psi(g);
        let back = stft_adjoint(&stft(&u).unwrap());
        assert!(back.l2_dist(&u) < 1e-10);
    }

    #[test]
    fn zero_signal() {
        let g = make_grid(8.0, 64, 1).unwrap();
        let z = SampledSignal::zeros(g);
        assert!(stft(&z).unwrap().values.iter().all(|v| *v == ZERO));
        assert_eq!(parseval_check(&z, &Window::standard(g)), Err(Error::DegenerateNorm));
        let pts = vec![vec![0.0, 0.0]];
        assert_eq!(stft_direct(&z, &Window::standard(g), &pts).unwrap()[0], ZERO);
    }

    #[test]
    fn bargmann_at_two() {
        let g = make_grid(16.0, 512, 1).unwrap();
        let f = stft(&psi(g)).unwrap();
        let v = bargmann_view(&f, 2.0, 0.0).unwrap();
        assert!((v.norm() - 0.3989422804014327 * 1f64.exp()).abs() < 1e-9);
        assert!(bargmann_view(&f, 0.01, 0.0).is_err());
    }

    #[test]
    fn binary_dump_round_trip() {
        let g = make_grid(4.0, 32, 1).unwrap();
        let f = stft(&psi(g)).unwrap();
        let mut buf = Vec::new();
        f.write_binary(&mut buf).unwrap();
        let back = read_field_dump(&buf[..]).unwrap();
        assert_eq!(back.values, f.values);
        assert_eq!(back.grid, g);
    }
}
