//! Classic pcap reading and writing.
//!
//! Both byte orders are accepted on input (magic 0xA1B2C3D4 or its swap);
//! output is always little-endian with microsecond timestamps. Payload
//! bytes past the transport header are dropped at parse time, so written
//! records carry exactly the header bytes.

use super::{CaptureError, CaptureFile, Ipv4Meta, Mac, PacketRecord, TcpMeta, TransportMeta};

const PCAP_MAGIC: u32 = 0xA1B2_C3D4;
const LINKTYPE_ETHERNET: u32 = 1;
const ETHERTYPE_IPV4: u16 = 0x0800;

/// A parsed capture plus the number of malformed trailing records that had
/// to be dropped (0 on well-formed input).
#[derive(Clone, Debug)]
pub struct ParsedCapture {
    pub capture: CaptureFile,
    pub truncated_records: usize,
}

struct Reader<'a> {
    data: &'a [u8],
    swapped: bool,
}

impl<'a> Reader<'a> {
    fn u16_at(&self, off: usize) -> u16 {
        let raw = [self.data[off], self.data[off + 1]];
        if self.swapped {
            u16::from_be_bytes(raw)
        } else {
            u16::from_le_bytes(raw)
        }
    }

    fn u32_at(&self, off: usize) -> u32 {
        let raw = [
            self.data[off],
            self.data[off + 1],
            self.data[off + 2],
            self.data[off + 3],
        ];
        if self.swapped {
            u32::from_be_bytes(raw)
        } else {
            u32::from_le_bytes(raw)
        }
    }
}

/// Parses a classic pcap byte stream into a labelled capture.
///
/// Non-IPv4 and non-TCP/UDP packets are retained with their optional
/// fields absent. A record header or body that runs past end-of-file
/// truncates the capture and is reported via `truncated_records`.
pub fn parse_capture(raw: &[u8], label: &str) -> Result<ParsedCapture, CaptureError> {
    if raw.len() < 24 {
        return Err(CaptureError::TruncatedHeader(raw.len()));
    }
    let magic_le = u32::from_le_bytes([raw[0], raw[1], raw[2], raw[3]]);
    let swapped = match magic_le {
        PCAP_MAGIC => false,
        m if m == PCAP_MAGIC.swap_bytes() => true,
        other => return Err(CaptureError::BadMagic(other)),
    };
    let reader = Reader { data: raw, swapped };
    let link_type = reader.u32_at(20);
    if link_type != LINKTYPE_ETHERNET {
        return Err(CaptureError::UnsupportedLinkType(link_type));
    }

    let mut packets = Vec::new();
    let mut truncated = 0usize;
    let mut off = 24;
    while off < raw.len() {
        if raw.len() - off < 16 {
            truncated += 1;
            break;
        }
        let ts_sec = reader.u32_at(off);
        let ts_usec = reader.u32_at(off + 4);
        let incl_len = reader.u32_at(off + 8) as usize;
        let orig_len = reader.u32_at(off + 12);
        off += 16;
        if raw.len() - off < incl_len {
            truncated += 1;
            break;
        }
        let ts_micros = u64::from(ts_sec) * 1_000_000 + u64::from(ts_usec);
        packets.push(parse_packet(ts_micros, &raw[off..off + incl_len], orig_len));
        off += incl_len;
    }
    // Keep arrival order for equal timestamps.
    packets.sort_by_key(|p| p.ts_micros);

    Ok(ParsedCapture {
        capture: CaptureFile {
            label: label.to_owned(),
            origin_id: String::new(),
            packets,
        },
        truncated_records: truncated,
    })
}

/// Decodes one captured record. `captured` may include payload; only the
/// header prefix is retained. Anything that fails structural checks is
/// kept opaque (full captured bytes, optional fields absent).
pub(crate) fn parse_packet(ts_micros: u64, captured: &[u8], orig_len: u32) -> PacketRecord {
    let mut eth = [0u8; 14];
    let n = captured.len().min(14);
    eth[..n].copy_from_slice(&captured[..n]);
    let dst_mac = Mac(eth[0..6].try_into().expect("fixed width"));
    let src_mac = Mac(eth[6..12].try_into().expect("fixed width"));
    let ethertype = u16::from_be_bytes([eth[12], eth[13]]);

    let opaque = |bytes: &[u8]| PacketRecord {
        ts_micros,
        src_mac,
        dst_mac,
        ethertype,
        ipv4: None,
        total_len: orig_len,
        header_bytes: bytes.to_vec(),
    };

    if ethertype != ETHERTYPE_IPV4 || captured.len() < 14 + 20 {
        return opaque(captured);
    }
    let ip = &captured[14..];
    let version = ip[0] >> 4;
    let ihl = (ip[0] & 0x0F) as usize * 4;
    if version != 4 || ihl < 20 || ip.len() < ihl {
        return opaque(captured);
    }
    let meta = Ipv4Meta {
        src_ip: std::net::Ipv4Addr::new(ip[12], ip[13], ip[14], ip[15]),
        dst_ip: std::net::Ipv4Addr::new(ip[16], ip[17], ip[18], ip[19]),
        ttl: ip[8],
        ip_id: u16::from_be_bytes([ip[4], ip[5]]),
        tos: ip[1],
        protocol: ip[9],
        transport: None,
    };
    let transport_bytes = &ip[ihl..];
    let (transport, transport_len) = match meta.protocol {
        6 if transport_bytes.len() >= 20 => {
            let data_offset = transport_bytes[12] >> 4;
            let tcp_len = data_offset as usize * 4;
            if !(5..=15).contains(&data_offset) || transport_bytes.len() < tcp_len {
                return opaque(captured);
            }
            (
                Some(TransportMeta::Tcp {
                    src_port: u16::from_be_bytes([transport_bytes[0], transport_bytes[1]]),
                    dst_port: u16::from_be_bytes([transport_bytes[2], transport_bytes[3]]),
                    tcp: TcpMeta {
                        flags: transport_bytes[13],
                        window: u16::from_be_bytes([transport_bytes[14], transport_bytes[15]]),
                        data_offset,
                    },
                }),
                tcp_len,
            )
        }
        17 if transport_bytes.len() >= 8 => (
            Some(TransportMeta::Udp {
                src_port: u16::from_be_bytes([transport_bytes[0], transport_bytes[1]]),
                dst_port: u16::from_be_bytes([transport_bytes[2], transport_bytes[3]]),
            }),
            8,
        ),
        6 | 17 => return opaque(captured),
        // Other IP protocols: keep the network header, drop the rest.
        _ => (None, 0),
    };

    let header_end = 14 + ihl + transport_len;
    PacketRecord {
        ts_micros,
        src_mac,
        dst_mac,
        ethertype,
        ipv4: Some(Ipv4Meta { transport, ..meta }),
        total_len: orig_len,
        header_bytes: captured[..header_end].to_vec(),
    }
}

/// Serializes a capture back to classic pcap bytes.
///
/// Every record is required to be self-consistent: re-deriving the decoded
/// fields from its header bytes must reproduce them. Mutated packets must
/// therefore go through the field setters (and a checksum recompute)
/// before being written.
pub fn write_capture(capture: &CaptureFile) -> Result<Vec<u8>, CaptureError> {
    for (index, p) in capture.packets.iter().enumerate() {
        let rederived = parse_packet(p.ts_micros, &p.header_bytes, p.total_len);
        if rederived != *p {
            return Err(CaptureError::InconsistentRecord { index });
        }
    }

    let body: usize = capture.packets.iter().map(|p| 16 + p.header_bytes.len()).sum();
    let mut out = Vec::with_capacity(24 + body);
    out.extend_from_slice(&PCAP_MAGIC.to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes()); // version major
    out.extend_from_slice(&4u16.to_le_bytes()); // version minor
    out.extend_from_slice(&0i32.to_le_bytes()); // thiszone
    out.extend_from_slice(&0u32.to_le_bytes()); // sigfigs
    out.extend_from_slice(&65535u32.to_le_bytes()); // snaplen
    out.extend_from_slice(&LINKTYPE_ETHERNET.to_le_bytes());
    for p in &capture.packets {
        out.extend_from_slice(&((p.ts_micros / 1_000_000) as u32).to_le_bytes());
        out.extend_from_slice(&((p.ts_micros % 1_000_000) as u32).to_le_bytes());
        out.extend_from_slice(&(p.header_bytes.len() as u32).to_le_bytes());
        out.extend_from_slice(&p.total_len.to_le_bytes());
        out.extend_from_slice(&p.header_bytes);
    }
    Ok(out)
}

/// Checksum for an IPv4 header whose checksum field is zeroed in place.
pub fn ipv4_checksum(header: &[u8]) -> u16 {
    !ones_complement_sum(header)
}

/// True iff the ones-complement sum over the header, checksum included,
/// folds to 0xFFFF.
pub fn ipv4_checksum_valid(header: &[u8]) -> bool {
    ones_complement_sum(header) == 0xFFFF
}

fn ones_complement_sum(bytes: &[u8]) -> u16 {
    let mut sum = 0u32;
    let mut chunks = bytes.chunks_exact(2);
    for pair in &mut chunks {
        sum += u32::from(u16::from_be_bytes([pair[0], pair[1]]));
    }
    if let [odd] = chunks.remainder() {
        sum += u32::from(u16::from_be_bytes([*odd, 0]));
    }
    while sum > 0xFFFF {
        sum = (sum & 0xFFFF) + (sum >> 16);
    }
    sum as u16
}
