//! Deterministic synthetic capture corpora.
//!
//! Drives demos, tests, and benchmarks without shipping binary fixtures:
//! everything is rebuilt from a seed. Transport checksums are left at zero
//! (unset) and IPv4 header checksums are always valid, matching what the
//! mitigation pipeline emits.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::net::Ipv4Addr;

use crate::capture::{ipv4_checksum, CaptureFile, Mac, PacketRecord};

/// Declarative description of one synthetic packet.
#[derive(Clone, Debug)]
pub struct PacketSpec {
    pub ts_micros: u64,
    pub src_mac: Mac,
    pub dst_mac: Mac,
    pub kind: PacketKind,
    pub ttl: u8,
    pub tos: u8,
    pub ip_id: u16,
    /// Payload bytes counted in the wire length but never stored.
    pub payload_len: u16,
}

#[derive(Clone, Debug)]
pub enum PacketKind {
    Tcp {
        src_ip: Ipv4Addr,
        dst_ip: Ipv4Addr,
        src_port: u16,
        dst_port: u16,
        flags: u8,
        window: u16,
    },
    Udp {
        src_ip: Ipv4Addr,
        dst_ip: Ipv4Addr,
        src_port: u16,
        dst_port: u16,
    },
    Icmp {
        src_ip: Ipv4Addr,
        dst_ip: Ipv4Addr,
    },
    /// An ARP request body; exercises the opaque non-IPv4 path.
    Arp,
}

impl PacketSpec {
    pub fn tcp(ts_micros: u64, src_ip: Ipv4Addr, dst_ip: Ipv4Addr, src_port: u16, dst_port: u16) -> Self {
        PacketSpec {
            ts_micros,
            src_mac: Mac([0x02, 0, 0, 0, 0, 1]),
            dst_mac: Mac([0x02, 0, 0, 0, 0, 2]),
            kind: PacketKind::Tcp {
                src_ip,
                dst_ip,
                src_port,
                dst_port,
                flags: 0x18, // PSH|ACK
                window: 64240,
            },
            ttl: 64,
            tos: 0,
            ip_id: 1,
            payload_len: 100,
        }
    }

    pub fn udp(ts_micros: u64, src_ip: Ipv4Addr, dst_ip: Ipv4Addr, src_port: u16, dst_port: u16) -> Self {
        PacketSpec {
            kind: PacketKind::Udp {
                src_ip,
                dst_ip,
                src_port,
                dst_port,
            },
            ..PacketSpec::tcp(ts_micros, src_ip, dst_ip, src_port, dst_port)
        }
    }

    /// Renders the spec to raw captured bytes plus the wire length.
    fn build_bytes(&self) -> (Vec<u8>, u32) {
        let mut bytes = Vec::with_capacity(64);
        bytes.extend_from_slice(&self.dst_mac.0);
        bytes.extend_from_slice(&self.src_mac.0);
        match &self.kind {
            PacketKind::Arp => {
                bytes.extend_from_slice(&0x0806u16.to_be_bytes());
                // hardware/protocol types and sizes, opcode 1 (request)
                bytes.extend_from_slice(&[0, 1, 8, 0, 6, 4, 0, 1]);
                bytes.extend_from_slice(&self.src_mac.0);
                bytes.extend_from_slice(&[10, 0, 0, 1]);
                bytes.extend_from_slice(&[0; 6]);
                bytes.extend_from_slice(&[10, 0, 0, 2]);
                let wire = bytes.len().max(60) as u32;
                return (bytes, wire);
            }
            _ => bytes.extend_from_slice(&0x0800u16.to_be_bytes()),
        }

        let (src_ip, dst_ip, protocol, transport): (Ipv4Addr, Ipv4Addr, u8, Vec<u8>) =
            match &self.kind {
                PacketKind::Tcp {
                    src_ip,
                    dst_ip,
                    src_port,
                    dst_port,
                    flags,
                    window,
                } => {
                    let mut t = Vec::with_capacity(20);
                    t.extend_from_slice(&src_port.to_be_bytes());
                    t.extend_from_slice(&dst_port.to_be_bytes());
                    t.extend_from_slice(&1u32.to_be_bytes()); // seq
                    t.extend_from_slice(&1u32.to_be_bytes()); // ack
                    t.push(5 << 4); // data offset 5, no options
                    t.push(*flags);
                    t.extend_from_slice(&window.to_be_bytes());
                    t.extend_from_slice(&[0, 0]); // checksum unset
                    t.extend_from_slice(&[0, 0]); // urgent
                    (*src_ip, *dst_ip, 6, t)
                }
                PacketKind::Udp {
                    src_ip,
                    dst_ip,
                    src_port,
                    dst_port,
                } => {
                    let mut t = Vec::with_capacity(8);
                    t.extend_from_slice(&src_port.to_be_bytes());
                    t.extend_from_slice(&dst_port.to_be_bytes());
                    t.extend_from_slice(&(8 + self.payload_len).to_be_bytes());
                    t.extend_from_slice(&[0, 0]); // checksum unset
                    (*src_ip, *dst_ip, 17, t)
                }
                PacketKind::Icmp { src_ip, dst_ip } => (*src_ip, *dst_ip, 1, Vec::new()),
                PacketKind::Arp => unreachable!("handled above"),
            };

        let icmp_body = if protocol == 1 { 8 } else { 0 };
        let ip_total = 20 + transport.len() + icmp_body + self.payload_len as usize;
        let mut ip = Vec::with_capacity(20);
        ip.push(0x45);
        ip.push(self.tos);
        ip.extend_from_slice(&(ip_total as u16).to_be_bytes());
        ip.extend_from_slice(&self.ip_id.to_be_bytes());
        ip.extend_from_slice(&0x4000u16.to_be_bytes()); // don't fragment
        ip.push(self.ttl);
        ip.push(protocol);
        ip.extend_from_slice(&[0, 0]); // checksum placeholder
        ip.extend_from_slice(&src_ip.octets());
        ip.extend_from_slice(&dst_ip.octets());
        let checksum = ipv4_checksum(&ip);
        ip[10..12].copy_from_slice(&checksum.to_be_bytes());

        bytes.extend_from_slice(&ip);
        bytes.extend_from_slice(&transport);
        let wire = (14 + ip_total) as u32;
        (bytes, wire)
    }

    pub fn build(&self) -> PacketRecord {
        let (bytes, wire) = self.build_bytes();
        crate::capture::pcap_parse_packet(self.ts_micros, &bytes, wire)
    }
}

/// Builds a capture from specs, sorting by timestamp (stable).
pub fn capture_from_specs(label: &str, origin_id: &str, specs: Vec<PacketSpec>) -> CaptureFile {
    let mut packets: Vec<PacketRecord> = specs.iter().map(PacketSpec::build).collect();
    packets.sort_by_key(|p| p.ts_micros);
    CaptureFile {
        label: label.to_owned(),
        origin_id: origin_id.to_owned(),
        packets,
    }
}

struct Host {
    ip: Ipv4Addr,
    mac: Mac,
    ttl: u8,
}

/// The bundled mini corpus: ~5,000 packets over five traffic labels, a
/// skewed host popularity profile (a few servers dominate), and a sprinkle
/// of ARP/ICMP so the non-flow paths stay exercised. Fully determined by
/// `seed`.
pub fn mini_corpus(seed: u64) -> Vec<CaptureFile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gateway_mac = Mac([0x00, 0x16, 0x3e, 0x00, 0x00, 0x01]);
    let servers: Vec<Host> = (0..6)
        .map(|i| Host {
            ip: Ipv4Addr::new(203, 0, 113, 10 + i),
            mac: gateway_mac,
            ttl: [64, 128, 255, 64, 128, 57][i as usize % 6],
        })
        .collect();
    let clients: Vec<Host> = (0..18)
        .map(|i| Host {
            ip: Ipv4Addr::new(10, 0, i / 8, 100 + (i % 8)),
            mac: Mac([0x00, 0x16, 0x3e, 0xaa, i, 1]),
            ttl: if i % 3 == 0 { 128 } else { 64 },
        })
        .collect();

    // (label, server pool, tcp?, server port)
    let profiles: [(&str, &[usize], bool, u16); 5] = [
        ("dns", &[0, 1], false, 53),
        ("web", &[0, 2, 3], true, 443),
        ("video", &[2, 4], false, 4433),
        ("ssh", &[3, 5], true, 22),
        ("iot", &[0, 5], true, 8883),
    ];

    let mut corpus = Vec::new();
    let mut ip_id_counter: u16 = 1;
    for (label, server_pool, is_tcp, server_port) in profiles {
        for file_idx in 0..4 {
            let mut ts = 1_700_000_000_000_000u64
                + u64::from(rng.gen_range(0u32..1_000_000)) * 10;
            let mut specs: Vec<PacketSpec> = Vec::new();
            let flow_count = rng.gen_range(6..=10);
            for _ in 0..flow_count {
                // Zipf-ish: the first server in the pool takes most flows.
                let server = &servers[server_pool
                    [if rng.gen_bool(0.7) { 0 } else { rng.gen_range(0..server_pool.len()) }]];
                let client = &clients[rng.gen_range(0..clients.len())];
                let client_port = rng.gen_range(1024..=60000);
                let exchanges: usize = rng.gen_range(18..=42);
                for ex in 0..exchanges {
                    ts += u64::from(rng.gen_range(50u32..40_000));
                    let outbound = ex % 3 != 2;
                    let (src, dst) = if outbound { (client, server) } else { (server, client) };
                    let (sport, dport) = if outbound {
                        (client_port, server_port)
                    } else {
                        (server_port, client_port)
                    };
                    let payload: u16 = match label {
                        "web" | "video" => rng.gen_range(200..1200),
                        "dns" => rng.gen_range(20..120),
                        _ => rng.gen_range(40..400),
                    };
                    ip_id_counter = ip_id_counter.wrapping_add(rng.gen_range(1..7));
                    let mut spec = if is_tcp {
                        let mut s = PacketSpec::tcp(ts, src.ip, dst.ip, sport, dport);
                        if let PacketKind::Tcp { flags, window, .. } = &mut s.kind {
                            *flags = if ex == 0 { 0x02 } else { [0x10, 0x18][ex % 2] };
                            *window = [64240, 29200, 5840, 501][rng.gen_range(0..4)];
                        }
                        s
                    } else {
                        PacketSpec::udp(ts, src.ip, dst.ip, sport, dport)
                    };
                    spec.src_mac = src.mac;
                    spec.dst_mac = dst.mac;
                    spec.ttl = src.ttl;
                    spec.tos = [0, 0, 0, 0x10, 0x48][rng.gen_range(0..5)];
                    spec.ip_id = ip_id_counter;
                    spec.payload_len = payload;
                    specs.push(spec);
                }
            }
            // Background chatter.
            if file_idx % 2 == 0 {
                ts += 1000;
                let client = &clients[rng.gen_range(0..clients.len())];
                specs.push(PacketSpec {
                    ts_micros: ts,
                    src_mac: client.mac,
                    dst_mac: Mac([0xff; 6]),
                    kind: PacketKind::Arp,
                    ttl: 0,
                    tos: 0,
                    ip_id: 0,
                    payload_len: 0,
                });
                ts += 500;
                specs.push(PacketSpec {
                    ts_micros: ts,
                    src_mac: client.mac,
                    dst_mac: gateway_mac,
                    kind: PacketKind::Icmp {
                        src_ip: client.ip,
                        dst_ip: servers[0].ip,
                    },
                    ttl: client.ttl,
                    tos: 0,
                    ip_id: ip_id_counter.wrapping_add(1),
                    payload_len: 0,
                });
            }
            corpus.push(capture_from_specs(
                label,
                &format!("{label}-{file_idx}"),
                specs,
            ));
        }
    }
    corpus
}
