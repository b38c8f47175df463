//! 5-tuple flow assembly.

use super::{CaptureFile, FlowKey, FlowTable};

/// Groups a capture's IPv4 TCP/UDP packets into directional 5-tuple flows.
/// A->B and B->A are distinct flows. Packets without a full 5-tuple are
/// skipped and counted.
pub fn assemble_flows(capture: &CaptureFile) -> FlowTable {
    let mut table = FlowTable::default();
    let mut last_ts: std::collections::BTreeMap<FlowKey, u64> = Default::default();
    for p in &capture.packets {
        let key = match (&p.ipv4, p.src_port(), p.dst_port()) {
            (Some(ip), Some(src_port), Some(dst_port)) => FlowKey {
                src_ip: ip.src_ip,
                dst_ip: ip.dst_ip,
                src_port,
                dst_port,
                protocol: ip.protocol,
            },
            _ => {
                table.non_flow_packets += 1;
                continue;
            }
        };
        let flow = table.flows.entry(key).or_default();
        flow.packet_count += 1;
        flow.byte_count += u64::from(p.total_len);
        flow.packet_sizes.push(p.total_len);
        if let Some(prev) = last_ts.insert(key, p.ts_micros) {
            flow.inter_arrival_micros.push(p.ts_micros.saturating_sub(prev));
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{self, PacketSpec};
    use rand::Rng;
    use rand::SeedableRng;
    use std::collections::HashMap;
    use std::net::Ipv4Addr;

    fn tcp_packet(ts: u64, src: [u8; 4], dst: [u8; 4], sport: u16, dport: u16) -> PacketSpec {
        PacketSpec::tcp(ts, Ipv4Addr::from(src), Ipv4Addr::from(dst), sport, dport)
    }

    #[test]
    fn directional_grouping() {
        let capture = corpus::capture_from_specs(
            "t",
            "f0",
            vec![
                tcp_packet(10, [10, 0, 0, 1], [10, 0, 0, 2], 1000, 80),
                tcp_packet(20, [10, 0, 0, 1], [10, 0, 0, 2], 1000, 80),
                tcp_packet(30, [10, 0, 0, 2], [10, 0, 0, 1], 80, 1000),
            ],
        );
        let table = assemble_flows(&capture);
        assert_eq!(table.flows.len(), 2);
        let counts: Vec<u64> = table.flows.values().map(|f| f.packet_count).collect();
        assert_eq!(counts, vec![2, 1]);
        assert_eq!(table.non_flow_packets, 0);
    }

    #[test]
    fn single_packet_flow_has_no_inter_arrivals() {
        let capture = corpus::capture_from_specs(
            "t",
            "f1",
            vec![tcp_packet(10, [10, 0, 0, 1], [10, 0, 0, 2], 1000, 80)],
        );
        let table = assemble_flows(&capture);
        assert_eq!(table.flows.len(), 1);
        let flow = table.flows.values().next().unwrap();
        assert!(flow.inter_arrival_micros.is_empty());
        assert_eq!(flow.packet_count, 1);
    }

    #[test]
    fn random_tuples_match_naive_tally() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let tuples: Vec<([u8; 4], [u8; 4], u16, u16)> = (0..7)
            .map(|i| {
                (
                    [10, 0, 0, i as u8 + 1],
                    [10, 0, 1, i as u8 + 1],
                    1000 + i as u16,
                    80,
                )
            })
            .collect();
        let mut specs = Vec::new();
        let mut naive: HashMap<usize, u64> = HashMap::new();
        for t in 0..100u64 {
            let which = rng.gen_range(0..tuples.len());
            let (s, d, sp, dp) = tuples[which];
            specs.push(tcp_packet(t * 5, s, d, sp, dp));
            *naive.entry(which).or_default() += 1;
        }
        let capture = corpus::capture_from_specs("t", "f2", specs);
        let table = assemble_flows(&capture);
        assert_eq!(table.flows.len(), naive.len());
        for (which, &count) in &naive {
            let (s, d, sp, dp) = tuples[*which];
            let key = FlowKey {
                src_ip: Ipv4Addr::from(s),
                dst_ip: Ipv4Addr::from(d),
                src_port: sp,
                dst_port: dp,
                protocol: 6,
            };
            let flow = &table.flows[&key];
            assert_eq!(flow.packet_count, count);
            assert_eq!(flow.inter_arrival_micros.len() as u64, count - 1);
        }
    }
}
