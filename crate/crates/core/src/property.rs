//! Sensitive-property leakage via normalized earth mover's distance.
//!
//! For each sensitive header field the training and generated corpora are
//! reduced to empirical distributions and compared with the 1-D EMD
//! (the integral of |CDF_a - CDF_b| over the merged support), divided by
//! the width of the field's valid domain so values land in [0, 1] and are
//! comparable across fields. Smaller distance = the generated traffic
//! tracks the training distribution more closely = higher leakage risk.

use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

use crate::capture::{assemble_flows, CaptureFile};

#[derive(Debug, Error)]
pub enum PropertyError {
    #[error("corpus has no samples for field {0:?}")]
    NoSamplesForField(PropertyField),
    #[error("distributions disagree on field/domain: {0}")]
    DomainMismatch(String),
}

/// The eight sensitive properties measured by the leakage report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyField {
    Ttl,
    IpId,
    Tos,
    TcpWindow,
    TcpFlags,
    TcpDataOffset,
    FlowSize,
    PacketSize,
}

impl PropertyField {
    pub const ALL: [PropertyField; 8] = [
        PropertyField::Ttl,
        PropertyField::IpId,
        PropertyField::Tos,
        PropertyField::TcpWindow,
        PropertyField::TcpFlags,
        PropertyField::TcpDataOffset,
        PropertyField::FlowSize,
        PropertyField::PacketSize,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PropertyField::Ttl => "ttl",
            PropertyField::IpId => "ip_id",
            PropertyField::Tos => "tos",
            PropertyField::TcpWindow => "tcp_window",
            PropertyField::TcpFlags => "tcp_flags",
            PropertyField::TcpDataOffset => "tcp_data_offset",
            PropertyField::FlowSize => "flow_size",
            PropertyField::PacketSize => "packet_size",
        }
    }

    /// Type-level valid domain, when the field has one. Flow and packet
    /// sizes are unbounded; their domain is fixed from observed data.
    pub fn fixed_domain(self) -> Option<(f64, f64)> {
        match self {
            PropertyField::Ttl | PropertyField::Tos | PropertyField::TcpFlags => {
                Some((0.0, 255.0))
            }
            PropertyField::IpId | PropertyField::TcpWindow => Some((0.0, 65535.0)),
            PropertyField::TcpDataOffset => Some((5.0, 15.0)),
            PropertyField::FlowSize | PropertyField::PacketSize => None,
        }
    }
}

impl std::str::FromStr for PropertyField {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        PropertyField::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown property field `{s}`"))
    }
}

/// A discrete distribution over numeric values within a fixed domain.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalDistribution {
    pub field: String,
    /// Strictly increasing values inside the domain.
    pub support: Vec<f64>,
    /// Probabilities aligned to support; non-negative, summing to 1.
    pub weights: Vec<f64>,
    pub domain: (f64, f64),
}

impl EmpiricalDistribution {
    /// Builds from raw samples; weights are occurrence fractions.
    pub fn from_samples(field: &str, samples: &[f64], domain: (f64, f64)) -> Self {
        assert!(!samples.is_empty(), "need at least one sample");
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for &v in samples {
            debug_assert!(v.is_finite());
            counts.entry(v.to_bits()).or_insert(0).count_add();
        }
        let total = samples.len() as f64;
        let mut pairs: Vec<(f64, f64)> = counts
            .into_iter()
            .map(|(bits, c)| (f64::from_bits(bits), c as f64 / total))
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
        EmpiricalDistribution {
            field: field.to_owned(),
            support: pairs.iter().map(|&(v, _)| v).collect(),
            weights: pairs.iter().map(|&(_, w)| w).collect(),
            domain,
        }
    }

    /// Widens the domain; support must already fit inside it.
    pub fn widen_domain(&mut self, low: f64, high: f64) {
        self.domain.0 = self.domain.0.min(low);
        self.domain.1 = self.domain.1.max(high);
    }

    pub fn max_support(&self) -> f64 {
        *self.support.last().expect("non-empty support")
    }
}

trait CountAdd {
    fn count_add(&mut self);
}

impl CountAdd for u64 {
    fn count_add(&mut self) {
        *self += 1;
    }
}

/// 1-D EMD between two distributions over one domain, normalized by the
/// domain width. Exact for step CDFs: sums |F_a - F_b| times the gap
/// between consecutive merged support points.
pub fn normalized_emd(
    a: &EmpiricalDistribution,
    b: &EmpiricalDistribution,
) -> Result<f64, PropertyError> {
    if a.field != b.field || a.domain != b.domain {
        return Err(PropertyError::DomainMismatch(format!(
            "{}/{:?} vs {}/{:?}",
            a.field, a.domain, b.field, b.domain
        )));
    }
    let width = a.domain.1 - a.domain.0;
    if width <= 0.0 {
        // Degenerate domain: both distributions sit on one point.
        return Ok(0.0);
    }

    let mut merged: Vec<f64> = a.support.iter().chain(b.support.iter()).copied().collect();
    merged.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    merged.dedup();

    let mut integral = 0.0;
    let (mut ia, mut ib) = (0usize, 0usize);
    let (mut cdf_a, mut cdf_b) = (0.0f64, 0.0f64);
    for i in 0..merged.len() {
        let v = merged[i];
        while ia < a.support.len() && a.support[ia] <= v {
            cdf_a += a.weights[ia];
            ia += 1;
        }
        while ib < b.support.len() && b.support[ib] <= v {
            cdf_b += b.weights[ib];
            ib += 1;
        }
        if let Some(&next) = merged.get(i + 1) {
            integral += (cdf_a - cdf_b).abs() * (next - v);
        }
    }
    Ok((integral / width).clamp(0.0, 1.0))
}

/// Extracts the empirical distribution of one field from a corpus.
/// Per-packet fields weight each carrying packet once; flow size weights
/// each flow once. Data-dependent domains run from 0 to the observed max.
pub fn field_distribution(
    corpus: &[CaptureFile],
    field: PropertyField,
) -> Result<EmpiricalDistribution, PropertyError> {
    let mut samples: Vec<f64> = Vec::new();
    match field {
        PropertyField::FlowSize => {
            for capture in corpus {
                let table = assemble_flows(capture);
                samples.extend(table.flows.values().map(|f| f.byte_count as f64));
            }
        }
        PropertyField::PacketSize => {
            for capture in corpus {
                samples.extend(capture.packets.iter().map(|p| f64::from(p.total_len)));
            }
        }
        _ => {
            for capture in corpus {
                for p in &capture.packets {
                    let value = match field {
                        PropertyField::Ttl => p.ipv4.as_ref().map(|ip| f64::from(ip.ttl)),
                        PropertyField::IpId => p.ipv4.as_ref().map(|ip| f64::from(ip.ip_id)),
                        PropertyField::Tos => p.ipv4.as_ref().map(|ip| f64::from(ip.tos)),
                        PropertyField::TcpWindow => p.tcp().map(|t| f64::from(t.window)),
                        PropertyField::TcpFlags => p.tcp().map(|t| f64::from(t.flags)),
                        PropertyField::TcpDataOffset => {
                            p.tcp().map(|t| f64::from(t.data_offset))
                        }
                        _ => unreachable!("flow/packet size handled above"),
                    };
                    if let Some(v) = value {
                        samples.push(v);
                    }
                }
            }
        }
    }
    if samples.is_empty() {
        return Err(PropertyError::NoSamplesForField(field));
    }
    let domain = field.fixed_domain().unwrap_or_else(|| {
        let max = samples.iter().copied().fold(0.0f64, f64::max);
        (0.0, max)
    });
    Ok(EmpiricalDistribution::from_samples(field.name(), &samples, domain))
}

/// Per-field normalized EMDs between two corpora. Fields absent from
/// either corpus come back as `None` (rendered "-" in the CSV export).
#[derive(Clone, Debug, Serialize)]
pub struct PropertyLeakageReport {
    pub per_field: BTreeMap<PropertyField, Option<f64>>,
}

pub fn property_leakage_report(
    training: &[CaptureFile],
    generated: &[CaptureFile],
) -> PropertyLeakageReport {
    let fields = PropertyField::ALL;
    let emds = crate::exec::map(&fields, |&field| {
        let (Ok(mut a), Ok(mut b)) = (
            field_distribution(training, field),
            field_distribution(generated, field),
        ) else {
            return None;
        };
        if field.fixed_domain().is_none() {
            // Unbounded fields share the max observed across both corpora.
            let max = a.max_support().max(b.max_support());
            a.widen_domain(0.0, max);
            b.widen_domain(0.0, max);
        }
        normalized_emd(&a, &b).ok()
    });
    PropertyLeakageReport {
        per_field: fields.into_iter().zip(emds).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dist(field: &str, pairs: &[(f64, f64)], domain: (f64, f64)) -> EmpiricalDistribution {
        EmpiricalDistribution {
            field: field.into(),
            support: pairs.iter().map(|&(v, _)| v).collect(),
            weights: pairs.iter().map(|&(_, w)| w).collect(),
            domain,
        }
    }

    /// Random distribution with integer support and rational weights, for
    /// exact comparison against the transport oracle.
    fn random_dist(rng: &mut ChaCha8Rng, field: &str, domain_max: i64) -> EmpiricalDistribution {
        let bins = rng.gen_range(1..=8usize);
        let mut support: Vec<i64> = Vec::new();
        while support.len() < bins {
            let v = rng.gen_range(0..=domain_max);
            if !support.contains(&v) {
                support.push(v);
            }
        }
        support.sort_unstable();
        let counts: Vec<u64> = (0..bins).map(|_| rng.gen_range(1..10)).collect();
        let total: u64 = counts.iter().sum();
        dist(
            field,
            &support
                .iter()
                .zip(&counts)
                .map(|(&v, &c)| (v as f64, c as f64 / total as f64))
                .collect::<Vec<_>>(),
            (0.0, domain_max as f64),
        )
    }

    fn oracle_emd(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
        // Rebuild integer histograms from the rational weights by scaling
        // with a common denominator.
        let scale = 9.0 * 8.0 * 7.0 * 5.0 * 4.0 * 2520.0; // lcm-ish, exact in f64
        let to_hist = |d: &EmpiricalDistribution| -> synthpriv_testkit::transport::Histogram {
            d.support
                .iter()
                .zip(&d.weights)
                .map(|(&v, &w)| (v as i64, (w * scale).round() as u64))
                .collect()
        };
        let cost = synthpriv_testkit::transport::emd(&to_hist(a), &to_hist(b));
        cost / (a.domain.1 - a.domain.0)
    }

    #[test]
    fn identical_distributions_have_zero_distance() {
        let d = dist("ttl", &[(64.0, 0.5), (128.0, 0.5)], (0.0, 255.0));
        assert_eq!(normalized_emd(&d, &d).unwrap(), 0.0);
    }

    #[test]
    fn extreme_point_masses_have_distance_one() {
        let a = dist("ttl", &[(0.0, 1.0)], (0.0, 255.0));
        let b = dist("ttl", &[(255.0, 1.0)], (0.0, 255.0));
        assert_eq!(normalized_emd(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn domain_mismatch_rejected() {
        let a = dist("ttl", &[(1.0, 1.0)], (0.0, 255.0));
        let b = dist("ttl", &[(1.0, 1.0)], (0.0, 65535.0));
        assert!(matches!(
            normalized_emd(&a, &b),
            Err(PropertyError::DomainMismatch(_))
        ));
    }

    #[test]
    fn matches_transport_oracle_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let a = random_dist(&mut rng, "f", 255);
            let b = random_dist(&mut rng, "f", 255);
            let fast = normalized_emd(&a, &b).unwrap();
            let slow = oracle_emd(&a, &b);
            assert!(
                (fast - slow).abs() < 1e-9,
                "cdf {fast} vs transport {slow}"
            );
        }
    }

    #[test]
    fn metric_properties_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..60 {
            let a = random_dist(&mut rng, "f", 100);
            let b = random_dist(&mut rng, "f", 100);
            let c = random_dist(&mut rng, "f", 100);
            let ab = normalized_emd(&a, &b).unwrap();
            let ba = normalized_emd(&b, &a).unwrap();
            let ac = normalized_emd(&a, &c).unwrap();
            let cb = normalized_emd(&c, &b).unwrap();
            assert!((ab - ba).abs() < 1e-12, "symmetry");
            assert!(ab <= ac + cb + 1e-12, "triangle inequality");
            assert!((0.0..=1.0).contains(&ab), "scale bound");
            assert!(normalized_emd(&a, &a).unwrap() < 1e-12, "identity");
        }
    }

    #[test]
    fn ttl_counting_example() {
        let specs: Vec<crate::corpus::PacketSpec> = [64u8, 64, 128, 255]
            .iter()
            .enumerate()
            .map(|(i, &ttl)| {
                let mut s = crate::corpus::PacketSpec::tcp(
                    i as u64,
                    std::net::Ipv4Addr::new(10, 0, 0, 1),
                    std::net::Ipv4Addr::new(10, 0, 0, 2),
                    1000,
                    80,
                );
                s.ttl = ttl;
                s
            })
            .collect();
        let capture = crate::corpus::capture_from_specs("t", "t0", specs);
        let d = field_distribution(&[capture], PropertyField::Ttl).unwrap();
        assert_eq!(d.support, vec![64.0, 128.0, 255.0]);
        assert_eq!(d.weights, vec![0.5, 0.25, 0.25]);
        assert_eq!(d.domain, (0.0, 255.0));
    }

    #[test]
    fn udp_only_corpus_lacks_tcp_fields() {
        let capture = crate::corpus::capture_from_specs(
            "t",
            "t0",
            vec![crate::corpus::PacketSpec::udp(
                0,
                std::net::Ipv4Addr::new(10, 0, 0, 1),
                std::net::Ipv4Addr::new(10, 0, 0, 2),
                5353,
                53,
            )],
        );
        assert!(matches!(
            field_distribution(&[capture], PropertyField::TcpWindow),
            Err(PropertyError::NoSamplesForField(PropertyField::TcpWindow))
        ));
    }

    #[test]
    fn flow_size_matches_flow_table() {
        let corpus = crate::corpus::mini_corpus(3);
        let d = field_distribution(&corpus, PropertyField::FlowSize).unwrap();
        let mut sizes: Vec<f64> = corpus
            .iter()
            .flat_map(|c| {
                assemble_flows(c)
                    .flows
                    .values()
                    .map(|f| f.byte_count as f64)
                    .collect::<Vec<_>>()
            })
            .collect();
        sizes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sizes.dedup();
        assert_eq!(d.support, sizes);
    }

    #[test]
    fn identity_report_is_all_zero() {
        let corpus = crate::corpus::mini_corpus(4);
        let report = property_leakage_report(&corpus, &corpus);
        for (field, emd) in &report.per_field {
            let emd = emd.unwrap_or_else(|| panic!("{field:?} missing"));
            assert!(emd.abs() < 1e-9, "{field:?} = {emd}");
        }
    }

    #[test]
    fn clipped_ttl_shift_hand_computed() {
        // Train TTLs {64, 128} equal mass; generated all clipped to 255.
        // Integral of |CDF gap|: 0.5*(128-64) + 1.0*(255-128) = 159.
        let make = |ttls: &[u8]| {
            let specs: Vec<_> = ttls
                .iter()
                .enumerate()
                .map(|(i, &ttl)| {
                    let mut s = crate::corpus::PacketSpec::tcp(
                        i as u64,
                        std::net::Ipv4Addr::new(10, 0, 0, 1),
                        std::net::Ipv4Addr::new(10, 0, 0, 2),
                        1000,
                        80,
                    );
                    s.ttl = ttl;
                    s
                })
                .collect();
            vec![crate::corpus::capture_from_specs("t", "t0", specs)]
        };
        let report = property_leakage_report(&make(&[64, 128]), &make(&[255, 255]));
        let ttl = report.per_field[&PropertyField::Ttl].unwrap();
        assert!((ttl - 159.0 / 255.0).abs() < 1e-12);
    }

    #[test]
    fn missing_fields_reported_as_not_applicable() {
        // Single-packet-per-file UDP corpus: no TCP fields on either side.
        let udp = |seed: u64| {
            vec![crate::corpus::capture_from_specs(
                "t",
                "t0",
                vec![crate::corpus::PacketSpec::udp(
                    seed,
                    std::net::Ipv4Addr::new(10, 0, 0, 1),
                    std::net::Ipv4Addr::new(10, 0, 0, 2),
                    5353,
                    53,
                )],
            )]
        };
        let report = property_leakage_report(&udp(0), &udp(1));
        assert!(report.per_field[&PropertyField::TcpWindow].is_none());
        assert!(report.per_field[&PropertyField::TcpFlags].is_none());
        assert!(report.per_field[&PropertyField::Ttl].is_some());
    }
}
