//! Terahertz channel model: spreading and molecular absorption losses,
//! element radiation patterns, per-element-pair complex link coefficients
//! and the full channel matrix between two planar arrays.
//!
//! Signals are power waves: `|amplitude|^2` is power in watts, and the link
//! coefficient is defined so that `|h|^2` is exactly the Friis power ratio
//! of a single element pair (element gains, patterns, spreading and
//! absorption losses included, receive aperture folded in).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, SimError};
use crate::geometry::{PlanarArray, Pose, Vec3};

/// Pinned propagation constant so outputs are bit-reproducible.
pub const SPEED_OF_LIGHT: f64 = 2.998e8;

/// Per-element radiation pattern, nonzero only over the front hemisphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiationPattern {
    /// F(theta) = cos(theta) for theta <= pi/2, else 0.
    CosineHemisphere,
    /// F(theta) = 1 for theta <= pi/2, else 0.
    IsotropicHemisphere,
}

impl RadiationPattern {
    /// Normalized pattern value at elevation `theta` (radians from boresight).
    pub fn value(&self, theta: f64) -> f64 {
        self.value_from_cos(theta.abs().min(std::f64::consts::PI).cos())
    }

    /// Same as [`value`](Self::value) but takes cos(theta) directly; used in
    /// inner loops where the cosine is already available from a dot product.
    #[inline]
    pub fn value_from_cos(&self, cos_theta: f64) -> f64 {
        if cos_theta <= 0.0 {
            return 0.0;
        }
        match self {
            RadiationPattern::CosineHemisphere => cos_theta,
            RadiationPattern::IsotropicHemisphere => 1.0,
        }
    }

    /// Directivity 4*pi / integral of F over the sphere, evaluated
    /// analytically: 4 for the cosine hemisphere, 2 for the isotropic one.
    pub fn directivity(&self) -> f64 {
        match self {
            RadiationPattern::CosineHemisphere => 4.0,
            RadiationPattern::IsotropicHemisphere => 2.0,
        }
    }
}

/// Physical channel parameters.
///
/// The wavelength is always derived from the carrier frequency and the
/// pinned speed of light, never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    /// Carrier frequency f_c in Hz.
    pub carrier_frequency: f64,
    /// Molecular absorption coefficient in dB per meter.
    pub absorption_db_per_m: f64,
    /// Characteristic impedance of air in ohms (used by the impedance ->
    /// reflection-coefficient mapping and the paper-literal noise mode).
    pub characteristic_impedance: f64,
    /// Transmit element gain (linear).
    pub tx_gain: f64,
    /// Receive element gain (linear).
    pub rx_gain: f64,
    pub tx_pattern: RadiationPattern,
    pub rx_pattern: RadiationPattern,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            carrier_frequency: 135e9,
            absorption_db_per_m: 9.217e-4,
            characteristic_impedance: 120.0 * std::f64::consts::PI,
            tx_gain: std::f64::consts::PI,
            rx_gain: std::f64::consts::PI,
            tx_pattern: RadiationPattern::CosineHemisphere,
            rx_pattern: RadiationPattern::CosineHemisphere,
        }
    }
}

impl ChannelParams {
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_frequency
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_frequency > 0.0) || !self.carrier_frequency.is_finite() {
            return Err(SimError::InvalidParameter(format!(
                "carrier frequency must be positive (got {})",
                self.carrier_frequency
            )));
        }
        if self.absorption_db_per_m < 0.0 || !self.absorption_db_per_m.is_finite() {
            return Err(SimError::InvalidParameter(format!(
                "absorption coefficient must be >= 0 dB/m (got {})",
                self.absorption_db_per_m
            )));
        }
        if !(self.characteristic_impedance > 0.0) {
            return Err(SimError::InvalidParameter(format!(
                "characteristic impedance must be positive (got {})",
                self.characteristic_impedance
            )));
        }
        if !(self.tx_gain > 0.0) || !(self.rx_gain > 0.0) {
            return Err(SimError::InvalidParameter(format!(
                "element gains must be positive (got tx {}, rx {})",
                self.tx_gain, self.rx_gain
            )));
        }
        Ok(())
    }
}

/// Free-space spreading loss (4*pi*f_c*d/c)^2, dimensionless.
pub fn spreading_loss(carrier_frequency: f64, distance: f64) -> Result<f64> {
    if !(carrier_frequency > 0.0) {
        return Err(SimError::InvalidParameter(format!(
            "carrier frequency must be positive (got {carrier_frequency})"
        )));
    }
    if !(distance > 0.0) {
        return Err(SimError::InvalidDistance(format!(
            "spreading loss requires d > 0 (got {distance})"
        )));
    }
    let x = 4.0 * std::f64::consts::PI * carrier_frequency * distance / SPEED_OF_LIGHT;
    Ok(x * x)
}

/// Molecular absorption loss 10^(alpha*d/10) for alpha in dB/m.
pub fn absorption_loss(alpha_db_per_m: f64, distance: f64) -> Result<f64> {
    if alpha_db_per_m < 0.0 {
        return Err(SimError::InvalidParameter(format!(
            "absorption coefficient must be >= 0 (got {alpha_db_per_m})"
        )));
    }
    if distance < 0.0 {
        return Err(SimError::InvalidDistance(format!(
            "absorption loss requires d >= 0 (got {distance})"
        )));
    }
    Ok(10f64.powf(alpha_db_per_m * distance / 10.0))
}

/// Complex power-wave amplitudes, one per array element; `|a_i|^2` is watts.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldVector {
    amps: Vec<Complex64>,
}

impl FieldVector {
    pub fn new(amps: Vec<Complex64>) -> Self {
        Self { amps }
    }

    pub fn zeros(len: usize) -> Self {
        Self { amps: vec![Complex64::new(0.0, 0.0); len] }
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    /// Total power in watts, summed in index-ascending order.
    pub fn total_power(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.amps.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    /// Elementwise complex conjugate; amplitudes are preserved exactly.
    pub fn conjugated(&self) -> FieldVector {
        FieldVector::new(self.amps.iter().map(|a| a.conj()).collect())
    }

    pub fn scaled(&self, s: f64) -> FieldVector {
        FieldVector::new(self.amps.iter().map(|a| a * s).collect())
    }
}

/// Complex matrix of per-element-pair link coefficients, shape
/// (receive elements x transmit elements), row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    rx_count: usize,
    tx_count: usize,
    entries: Vec<Complex64>,
    fingerprint: u64,
}

impl ChannelMatrix {
    pub fn rx_count(&self) -> usize {
        self.rx_count
    }

    pub fn tx_count(&self) -> usize {
        self.tx_count
    }

    pub fn entry(&self, r: usize, t: usize) -> Complex64 {
        self.entries[r * self.tx_count + t]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Hash of the frequency and geometry the matrix was built from.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Sum of squared entry magnitudes (total pairwise power coupling).
    pub fn frobenius_sq(&self) -> f64 {
        self.entries.iter().map(|h| h.norm_sqr()).sum()
    }

    /// b = H a. Each output row is reduced in index-ascending order, so the
    /// result is identical no matter how rows are scheduled across threads.
    pub fn mul_vec(&self, a: &FieldVector) -> Result<FieldVector> {
        if a.len() != self.tx_count {
            return Err(SimError::ShapeMismatch(format!(
                "field vector has {} amplitudes, channel expects {}",
                a.len(),
                self.tx_count
            )));
        }
        let amps = a.amps();
        let out: Vec<Complex64> = self
            .entries
            .par_chunks(self.tx_count)
            .map(|row| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (h, x) in row.iter().zip(amps) {
                    acc += h * x;
                }
                acc
            })
            .collect();
        Ok(FieldVector::new(out))
    }

    /// b = H^T a (plain transpose, no conjugation): the uplink direction of a
    /// reciprocal channel.
    pub fn mul_transpose_vec(&self, a: &FieldVector) -> Result<FieldVector> {
        if a.len() != self.rx_count {
            return Err(SimError::ShapeMismatch(format!(
                "field vector has {} amplitudes, transposed channel expects {}",
                a.len(),
                self.rx_count
            )));
        }
        let amps = a.amps();
        let tx = self.tx_count;
        let out: Vec<Complex64> = (0..tx)
            .into_par_iter()
            .map(|t| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (r, x) in amps.iter().enumerate() {
                    acc += self.entries[r * tx + t] * x;
                }
                acc
            })
            .collect();
        Ok(FieldVector::new(out))
    }
}

/// Complex link coefficient h between one transmit and one receive element.
///
/// |h|^2 = G_t G_r lambda^2 F_t F_r / ((4 pi d)^2 L_abs) and
/// arg h = -2 pi d / lambda.
pub fn link_coefficient(
    params: &ChannelParams,
    tx_point: Vec3,
    tx_pose: &Pose,
    rx_point: Vec3,
    rx_pose: &Pose,
) -> Result<Complex64> {
    let dir = rx_point - tx_point;
    let dist = dir.norm();
    if dist == 0.0 || !dist.is_finite() {
        return Err(SimError::DegenerateGeometry(
            "link coefficient undefined for coincident elements".into(),
        ));
    }
    let inv_d = 1.0 / dist;
    let cos_t = dir.dot(tx_pose.boresight) * inv_d;
    let cos_r = -dir.dot(rx_pose.boresight) * inv_d;
    let ft = params.tx_pattern.value_from_cos(cos_t);
    let fr = params.rx_pattern.value_from_cos(cos_r);
    if ft == 0.0 || fr == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let lambda = params.wavelength();
    let labs = 10f64.powf(params.absorption_db_per_m * dist / 10.0);
    let mag = (params.tx_gain * params.rx_gain * ft * fr / labs).sqrt() * lambda
        / (4.0 * std::f64::consts::PI * dist);
    let phase = -2.0 * std::f64::consts::PI * dist / lambda;
    Ok(Complex64::from_polar(mag, phase))
}

/// Builds the full channel matrix between two arrays: entry (r, t) is the
/// link coefficient from transmit element t to receive element r.
///
/// Entries are pure functions of the geometry, so any parallel schedule
/// produces a bit-identical matrix.
pub fn build_channel_matrix(
    params: &ChannelParams,
    tx: &PlanarArray,
    rx: &PlanarArray,
) -> Result<ChannelMatrix> {
    params.validate()?;
    let tx_pts = tx.positions();
    let rx_pts = rx.positions();
    let tx_pose = *tx.pose();
    let rx_pose = *rx.pose();
    let rows: Vec<Result<Vec<Complex64>>> = rx_pts
        .par_iter()
        .map(|&rp| {
            tx_pts
                .iter()
                .map(|&tp| {
                    link_coefficient(params, tp, &tx_pose, rp, &rx_pose).map_err(|_| {
                        SimError::DegenerateGeometry(
                            "arrays overlap: coincident transmit/receive elements".into(),
                        )
                    })
                })
                .collect()
        })
        .collect();
    let mut entries = Vec::with_capacity(tx_pts.len() * rx_pts.len());
    for row in rows {
        entries.extend(row?);
    }
    Ok(ChannelMatrix {
        rx_count: rx_pts.len(),
        tx_count: tx_pts.len(),
        entries,
        fingerprint: fingerprint(params, tx, rx),
    })
}

/// b = H a; received power per element is |b_r|^2.
pub fn propagate(h: &ChannelMatrix, a: &FieldVector) -> Result<FieldVector> {
    h.mul_vec(a)
}

fn fingerprint(params: &ChannelParams, tx: &PlanarArray, rx: &PlanarArray) -> u64 {
    let mut h = Fnv::new();
    h.f64(params.carrier_frequency);
    h.f64(params.absorption_db_per_m);
    h.f64(params.tx_gain);
    h.f64(params.rx_gain);
    h.u64(params.tx_pattern as u64);
    h.u64(params.rx_pattern as u64);
    for a in [tx, rx] {
        h.u64(a.rows() as u64);
        h.u64(a.cols() as u64);
        h.f64(a.dx());
        h.f64(a.dy());
        for v in [a.pose().origin, a.pose().u, a.pose().v, a.pose().boresight] {
            h.f64(v.x);
            h.f64(v.y);
            h.f64(v.z);
        }
    }
    h.finish()
}

/// FNV-1a, pinned here so fingerprints are stable across toolchains.
struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf29ce484222325)
    }
    fn u64(&mut self, v: u64) {
        for b in v.to_le_bytes() {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x100000001b3);
        }
    }
    fn f64(&mut self, v: f64) {
        self.u64(v.to_bits());
    }
    fn finish(&self) -> u64 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn boresight_pair(d: f64) -> (Vec3, Pose, Vec3, Pose) {
        let tx_pose = Pose::identity();
        let rx_pose = Pose::facing(Vec3::new(0.0, 0.0, d), Vec3::ZERO).unwrap();
        (Vec3::ZERO, tx_pose, Vec3::new(0.0, 0.0, d), rx_pose)
    }

    #[test]
    fn spreading_loss_is_one_at_unit_loss_distance() {
        let f = 135e9;
        let d = SPEED_OF_LIGHT / (4.0 * PI * f);
        let l = spreading_loss(f, d).unwrap();
        assert!((l - 1.0).abs() < 1e-12);
        assert!((d - 0.1768e-3).abs() < 1e-6);
    }

    #[test]
    fn spreading_loss_at_one_meter() {
        let l = spreading_loss(135e9, 1.0).unwrap();
        let expect = (4.0 * PI * 135e9 / SPEED_OF_LIGHT).powi(2);
        assert!((l - expect).abs() / expect < 1e-12);
        // ~75 dB, close to the 3.198e7 obtained with c rounded to 3e8.
        assert!((l - 3.198e7).abs() / 3.198e7 < 2e-3);
    }

    #[test]
    fn spreading_loss_quadruples_when_distance_doubles() {
        let l1 = spreading_loss(135e9, 0.7).unwrap();
        let l2 = spreading_loss(135e9, 1.4).unwrap();
        assert_eq!(l2, 4.0 * l1);
    }

    #[test]
    fn spreading_loss_rejects_nonpositive_distance() {
        assert!(spreading_loss(135e9, 0.0).is_err());
        assert!(spreading_loss(135e9, -1.0).is_err());
    }

    #[test]
    fn absorption_loss_is_unity_in_lossless_medium() {
        for d in [0.0, 0.5, 10.0, 1e4] {
            assert_eq!(absorption_loss(0.0, d).unwrap(), 1.0);
        }
    }

    #[test]
    fn absorption_loss_at_two_meters() {
        let l = absorption_loss(9.217e-4, 2.0).unwrap();
        let expect = (9.217e-4 * 2.0 / 10.0 * std::f64::consts::LN_10).exp();
        assert!((l - expect).abs() / expect < 1e-12);
        assert!((l - 1.000424).abs() < 1e-6);
    }

    #[test]
    fn absorption_loss_at_kilometer_scale() {
        let l = absorption_loss(9.217e-4, 1000.0).unwrap();
        assert!((l - 1.2365).abs() < 1e-3);
    }

    #[test]
    fn absorption_loss_rejects_negative_distance() {
        assert!(absorption_loss(9.217e-4, -0.1).is_err());
    }

    #[test]
    fn pattern_values_at_reference_angles() {
        let p = RadiationPattern::CosineHemisphere;
        assert_eq!(p.value(0.0), 1.0);
        assert_eq!(p.value(PI / 2.0), 0.0);
        assert!((p.value(PI / 3.0) - 0.5).abs() < 1e-15);
        assert_eq!(p.value(0.6 * PI), 0.0);
        let q = RadiationPattern::IsotropicHemisphere;
        assert_eq!(q.value(0.3), 1.0);
        assert_eq!(q.value(2.0), 0.0);
    }

    /// Quadrature oracle for the directivity definition
    /// G = 4 pi / (double integral of F sin(theta) dtheta dphi).
    fn directivity_by_quadrature(f: impl Fn(f64) -> f64) -> f64 {
        let n = 20_000;
        let dt = PI / n as f64;
        let mut integral = 0.0;
        for i in 0..n {
            let theta = (i as f64 + 0.5) * dt;
            integral += f(theta) * theta.sin() * dt;
        }
        // Patterns have no phi dependence.
        4.0 * PI / (2.0 * PI * integral)
    }

    #[test]
    fn directivity_matches_quadrature() {
        let cosine = RadiationPattern::CosineHemisphere;
        let iso = RadiationPattern::IsotropicHemisphere;
        assert_eq!(cosine.directivity(), 4.0);
        assert_eq!(iso.directivity(), 2.0);
        assert!((directivity_by_quadrature(|t| cosine.value(t)) - 4.0).abs() < 1e-3);
        assert!((directivity_by_quadrature(|t| iso.value(t)) - 2.0).abs() < 1e-3);
        // Full isotropic F = 1 over the whole sphere integrates to 1.
        assert!((directivity_by_quadrature(|_| 1.0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn boresight_link_power_matches_friis_closed_form() {
        let params = ChannelParams { absorption_db_per_m: 0.0, ..Default::default() };
        let (tp, tpose, rp, rpose) = boresight_pair(1.0);
        let h = link_coefficient(&params, tp, &tpose, rp, &rpose).unwrap();
        let lambda = params.wavelength();
        let expect = PI * PI * lambda * lambda / (4.0 * PI).powi(2);
        assert!((h.norm_sqr() - expect).abs() / expect < 1e-12);
        // about -65.1 dB
        assert!((10.0 * h.norm_sqr().log10() + 65.1).abs() < 0.05);
    }

    #[test]
    fn link_power_matches_friis_for_random_geometry() {
        // Eq. (15) route recomputed from scratch for 100 pseudo-random samples.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let f = 50e9 + 250e9 * next();
            let d = 0.1 + 3.0 * next();
            let params = ChannelParams { carrier_frequency: f, ..Default::default() };
            let (tp, tpose, rp, rpose) = boresight_pair(d);
            let h = link_coefficient(&params, tp, &tpose, rp, &rpose).unwrap();
            let friis = params.tx_gain * params.rx_gain
                / (spreading_loss(f, d).unwrap() * absorption_loss(9.217e-4, d).unwrap());
            assert!((h.norm_sqr() - friis).abs() / friis < 1e-9);
        }
    }

    #[test]
    fn link_is_zero_behind_hemisphere() {
        let params = ChannelParams::default();
        let tx_pose = Pose::identity();
        // Receive element behind the transmit plane.
        let rx_pose = Pose::facing(Vec3::new(0.0, 0.0, -1.0), Vec3::ZERO).unwrap();
        let h = link_coefficient(&params, Vec3::ZERO, &tx_pose, Vec3::new(0.0, 0.0, -1.0), &rx_pose)
            .unwrap();
        assert_eq!(h, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn phase_is_unity_at_whole_wavelength() {
        let params = ChannelParams::default();
        let lambda = params.wavelength();
        let (tp, tpose, rp, rpose) = boresight_pair(lambda);
        let h = link_coefficient(&params, tp, &tpose, rp, &rpose).unwrap();
        let unit = h / h.norm();
        assert!((unit.re - 1.0).abs() < 1e-12);
        assert!(unit.im.abs() < 1e-12);
    }

    #[test]
    fn coincident_elements_are_rejected() {
        let params = ChannelParams::default();
        let pose = Pose::identity();
        assert!(link_coefficient(&params, Vec3::ZERO, &pose, Vec3::ZERO, &pose).is_err());
    }

    fn small_arrays(d: f64, rows: usize, cols: usize) -> (PlanarArray, PlanarArray) {
        let spacing = ChannelParams::default().wavelength() / 2.0;
        let tx = PlanarArray::new(rows, cols, spacing, Pose::identity()).unwrap();
        let rx_pose = Pose::facing(Vec3::new(0.0, 0.0, d), Vec3::ZERO).unwrap();
        let rx = PlanarArray::new(cols, rows, spacing, rx_pose).unwrap();
        (tx, rx)
    }

    #[test]
    fn single_pair_matrix_reduces_to_link_coefficient() {
        let params = ChannelParams::default();
        let (tx, rx) = small_arrays(0.8, 1, 1);
        let h = build_channel_matrix(&params, &tx, &rx).unwrap();
        assert_eq!((h.rx_count(), h.tx_count()), (1, 1));
        let direct = link_coefficient(
            &params,
            tx.element_position(1, 1).unwrap(),
            tx.pose(),
            rx.element_position(1, 1).unwrap(),
            rx.pose(),
        )
        .unwrap();
        assert_eq!(h.entry(0, 0), direct);
    }

    #[test]
    fn swapping_arrays_transposes_the_matrix() {
        let params = ChannelParams::default();
        let (tx, rx) = small_arrays(0.6, 2, 3);
        let down = build_channel_matrix(&params, &tx, &rx).unwrap();
        let up = build_channel_matrix(&params, &rx, &tx).unwrap();
        for r in 0..down.rx_count() {
            for t in 0..down.tx_count() {
                let a = down.entry(r, t);
                let b = up.entry(t, r);
                assert!((a - b).norm() <= 1e-12 * a.norm().max(1e-300));
            }
        }
    }

    #[test]
    fn centered_grid_symmetry_gives_equal_magnitudes() {
        let params = ChannelParams::default();
        let spacing = params.wavelength() / 2.0;
        let tx = PlanarArray::new(2, 2, spacing, Pose::identity()).unwrap();
        let rx_pose = Pose::facing(Vec3::new(0.0, 0.0, 1.0), Vec3::ZERO).unwrap();
        let rx = PlanarArray::new(1, 1, spacing, rx_pose).unwrap();
        let h = build_channel_matrix(&params, &tx, &rx).unwrap();
        let m0 = h.entry(0, 0).norm();
        for t in 1..4 {
            assert!((h.entry(0, t).norm() - m0).abs() < 1e-15);
        }
    }

    #[test]
    fn overlapping_arrays_are_rejected() {
        let params = ChannelParams::default();
        let spacing = params.wavelength() / 2.0;
        let a = PlanarArray::new(2, 2, spacing, Pose::identity()).unwrap();
        assert!(build_channel_matrix(&params, &a, &a).is_err());
    }

    #[test]
    fn propagate_zero_gives_zero() {
        let params = ChannelParams::default();
        let (tx, rx) = small_arrays(0.5, 2, 2);
        let h = build_channel_matrix(&params, &tx, &rx).unwrap();
        let b = propagate(&h, &FieldVector::zeros(4)).unwrap();
        assert_eq!(b.total_power(), 0.0);
    }

    #[test]
    fn propagate_scalar_channel() {
        let params = ChannelParams::default();
        let (tx, rx) = small_arrays(0.5, 1, 1);
        let h = build_channel_matrix(&params, &tx, &rx).unwrap();
        let a = FieldVector::new(vec![Complex64::new(1.0, 0.0)]);
        let b = propagate(&h, &a).unwrap();
        assert_eq!(b.amps()[0], h.entry(0, 0));
    }

    #[test]
    fn propagate_is_linear() {
        let params = ChannelParams::default();
        let (tx, rx) = small_arrays(0.5, 2, 3);
        let h = build_channel_matrix(&params, &tx, &rx).unwrap();
        let a = FieldVector::new(
            (0..6).map(|i| Complex64::from_polar(1.0 + i as f64, 0.7 * i as f64)).collect(),
        );
        let b = FieldVector::new(
            (0..6).map(|i| Complex64::from_polar(0.3 * i as f64, -1.1 * i as f64)).collect(),
        );
        let (alpha, beta) = (2.5, -0.75);
        let combo = FieldVector::new(
            a.amps().iter().zip(b.amps()).map(|(x, y)| alpha * x + beta * y).collect(),
        );
        let lhs = propagate(&h, &combo).unwrap();
        let ha = propagate(&h, &a).unwrap();
        let hb = propagate(&h, &b).unwrap();
        for r in 0..lhs.len() {
            let rhs = alpha * ha.amps()[r] + beta * hb.amps()[r];
            assert!((lhs.amps()[r] - rhs).norm() < 1e-12 * rhs.norm().max(1e-30));
        }
    }

    #[test]
    fn propagate_rejects_dimension_mismatch() {
        let params = ChannelParams::default();
        let (tx, rx) = small_arrays(0.5, 2, 2);
        let h = build_channel_matrix(&params, &tx, &rx).unwrap();
        assert!(propagate(&h, &FieldVector::zeros(5)).is_err());
    }

    #[test]
    fn transpose_multiply_matches_explicit_transpose() {
        let params = ChannelParams::default();
        let (tx, rx) = small_arrays(0.4, 2, 3);
        let down = build_channel_matrix(&params, &tx, &rx).unwrap();
        let up = build_channel_matrix(&params, &rx, &tx).unwrap();
        let a = FieldVector::new(
            (0..down.rx_count())
                .map(|i| Complex64::from_polar(1.0 / (1.0 + i as f64), 0.4 * i as f64))
                .collect(),
        );
        let via_transpose = down.mul_transpose_vec(&a).unwrap();
        let via_swapped = up.mul_vec(&a).unwrap();
        for t in 0..via_transpose.len() {
            let d = (via_transpose.amps()[t] - via_swapped.amps()[t]).norm();
            assert!(d <= 1e-12 * via_swapped.amps()[t].norm().max(1e-300));
        }
    }

    #[test]
    fn fingerprint_tracks_geometry_and_frequency() {
        let params = ChannelParams::default();
        let (tx, rx) = small_arrays(0.5, 2, 2);
        let h1 = build_channel_matrix(&params, &tx, &rx).unwrap();
        let h2 = build_channel_matrix(&params, &tx, &rx).unwrap();
        assert_eq!(h1.fingerprint(), h2.fingerprint());
        let other = ChannelParams { carrier_frequency: 140e9, ..Default::default() };
        let h3 = build_channel_matrix(&other, &tx, &rx).unwrap();
        assert_ne!(h1.fingerprint(), h3.fingerprint());
    }
}
