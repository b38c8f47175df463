//! Packet captures: parsing, flow assembly, segmentation, dataset splits.
//!
//! Only classic pcap (Ethernet link layer, IPv4, TCP/UDP) is parsed
//! structurally; anything else is carried through opaquely. That covers
//! every header field the audit metrics touch.

mod flows;
mod manifest;
mod pcap;
mod split;

pub use flows::assemble_flows;
pub use manifest::{load_corpus, read_manifest, write_corpus, write_manifest, LoadedCorpus, ManifestEntry};
pub use pcap::{ipv4_checksum, ipv4_checksum_valid, parse_capture, write_capture, ParsedCapture};
pub(crate) use pcap::parse_packet as pcap_parse_packet;
pub use split::{segment_capture, split_dataset};

use std::collections::BTreeMap;
use std::fmt;
use std::net::Ipv4Addr;

use thiserror::Error;

/// Per-label cap applied when preparing a dataset.
pub const DEFAULT_PER_LABEL_CAP: usize = 60;
/// Maximum packets per capture segment.
pub const DEFAULT_SEGMENT_PACKETS: usize = 2000;
/// Maximum segments sampled from one original capture.
pub const DEFAULT_MAX_SEGMENTS: usize = 20;
/// Number of labels held out entirely as non-training data.
pub const DEFAULT_HOLDOUT_LABELS: usize = 2;

#[derive(Debug, Error)]
pub enum CaptureError {
    #[error("unknown pcap magic 0x{0:08X}")]
    BadMagic(u32),
    #[error("pcap global header truncated: {0} bytes, need 24")]
    TruncatedHeader(usize),
    #[error("unsupported link type {0}, only Ethernet (1) is handled")]
    UnsupportedLinkType(u32),
    #[error("packet {index}: stored fields disagree with header bytes")]
    InconsistentRecord { index: usize },
    #[error("corpus has {found} distinct labels, need more than {needed}")]
    TooFewLabels { found: usize, needed: usize },
    #[error("manifest {path}: {message}")]
    Manifest { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A 48-bit link-layer address.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mac(pub [u8; 6]);

impl Mac {
    pub fn to_u64(self) -> u64 {
        let b = self.0;
        (u64::from(b[0]) << 40)
            | (u64::from(b[1]) << 32)
            | (u64::from(b[2]) << 24)
            | (u64::from(b[3]) << 16)
            | (u64::from(b[4]) << 8)
            | u64::from(b[5])
    }

    pub fn from_u64(v: u64) -> Self {
        Mac([
            (v >> 40) as u8,
            (v >> 32) as u8,
            (v >> 24) as u8,
            (v >> 16) as u8,
            (v >> 8) as u8,
            v as u8,
        ])
    }
}

impl fmt::Display for Mac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = self.0;
        write!(
            f,
            "{:02x}:{:02x}:{:02x}:{:02x}:{:02x}:{:02x}",
            b[0], b[1], b[2], b[3], b[4], b[5]
        )
    }
}

/// TCP-specific header fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TcpMeta {
    pub flags: u8,
    pub window: u16,
    /// Header length in 32-bit words, 5..=15.
    pub data_offset: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransportMeta {
    Tcp { src_port: u16, dst_port: u16, tcp: TcpMeta },
    Udp { src_port: u16, dst_port: u16 },
}

impl TransportMeta {
    pub fn src_port(&self) -> u16 {
        match *self {
            TransportMeta::Tcp { src_port, .. } | TransportMeta::Udp { src_port, .. } => src_port,
        }
    }

    pub fn dst_port(&self) -> u16 {
        match *self {
            TransportMeta::Tcp { dst_port, .. } | TransportMeta::Udp { dst_port, .. } => dst_port,
        }
    }

    pub fn tcp(&self) -> Option<&TcpMeta> {
        match self {
            TransportMeta::Tcp { tcp, .. } => Some(tcp),
            TransportMeta::Udp { .. } => None,
        }
    }
}

/// IPv4 header fields, present only for parsed IPv4 packets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ipv4Meta {
    pub src_ip: Ipv4Addr,
    pub dst_ip: Ipv4Addr,
    pub ttl: u8,
    pub ip_id: u16,
    pub tos: u8,
    pub protocol: u8,
    pub transport: Option<TransportMeta>,
}

/// One captured packet: decoded fields plus the raw bytes of the
/// link+network+transport headers (payload is never retained).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PacketRecord {
    pub ts_micros: u64,
    pub src_mac: Mac,
    pub dst_mac: Mac,
    pub ethertype: u16,
    pub ipv4: Option<Ipv4Meta>,
    /// Original length on the wire, which may exceed the stored header bytes.
    pub total_len: u32,
    pub header_bytes: Vec<u8>,
}

impl PacketRecord {
    pub fn src_ip(&self) -> Option<Ipv4Addr> {
        self.ipv4.as_ref().map(|ip| ip.src_ip)
    }

    pub fn dst_ip(&self) -> Option<Ipv4Addr> {
        self.ipv4.as_ref().map(|ip| ip.dst_ip)
    }

    pub fn src_port(&self) -> Option<u16> {
        self.ipv4.as_ref()?.transport.as_ref().map(|t| t.src_port())
    }

    pub fn dst_port(&self) -> Option<u16> {
        self.ipv4.as_ref()?.transport.as_ref().map(|t| t.dst_port())
    }

    pub fn tcp(&self) -> Option<&TcpMeta> {
        self.ipv4.as_ref()?.transport.as_ref()?.tcp()
    }

    fn ip_header_range(&self) -> Option<(usize, usize)> {
        self.ipv4.as_ref()?;
        let ihl = (self.header_bytes.get(14)? & 0x0F) as usize * 4;
        Some((14, 14 + ihl))
    }

    /// Patches both the decoded field and the raw bytes; a no-op on packets
    /// that do not carry the field. Callers are expected to recompute the
    /// IPv4 checksum afterwards (see `mitigate::recompute_checksums`).
    pub fn set_src_mac(&mut self, mac: Mac) {
        if self.header_bytes.len() >= 12 {
            self.header_bytes[6..12].copy_from_slice(&mac.0);
        }
        self.src_mac = mac;
    }

    pub fn set_dst_mac(&mut self, mac: Mac) {
        if self.header_bytes.len() >= 6 {
            self.header_bytes[0..6].copy_from_slice(&mac.0);
        }
        self.dst_mac = mac;
    }

    pub fn set_src_ip(&mut self, ip: Ipv4Addr) {
        if let Some((start, _)) = self.ip_header_range() {
            self.header_bytes[start + 12..start + 16].copy_from_slice(&ip.octets());
            self.ipv4.as_mut().expect("checked").src_ip = ip;
        }
    }

    pub fn set_dst_ip(&mut self, ip: Ipv4Addr) {
        if let Some((start, _)) = self.ip_header_range() {
            self.header_bytes[start + 16..start + 20].copy_from_slice(&ip.octets());
            self.ipv4.as_mut().expect("checked").dst_ip = ip;
        }
    }

    pub fn set_ttl(&mut self, ttl: u8) {
        if let Some((start, _)) = self.ip_header_range() {
            self.header_bytes[start + 8] = ttl;
            self.ipv4.as_mut().expect("checked").ttl = ttl;
        }
    }

    pub fn set_ip_id(&mut self, id: u16) {
        if let Some((start, _)) = self.ip_header_range() {
            self.header_bytes[start + 4..start + 6].copy_from_slice(&id.to_be_bytes());
            self.ipv4.as_mut().expect("checked").ip_id = id;
        }
    }

    pub fn set_tos(&mut self, tos: u8) {
        if let Some((start, _)) = self.ip_header_range() {
            self.header_bytes[start + 1] = tos;
            self.ipv4.as_mut().expect("checked").tos = tos;
        }
    }

    pub fn set_tcp_flags(&mut self, flags: u8) {
        if let Some((_, ip_end)) = self.ip_header_range() {
            if self.tcp().is_some() {
                self.header_bytes[ip_end + 13] = flags;
                if let Some(TransportMeta::Tcp { tcp, .. }) =
                    self.ipv4.as_mut().and_then(|ip| ip.transport.as_mut())
                {
                    tcp.flags = flags;
                }
            }
        }
    }

    pub fn set_tcp_window(&mut self, window: u16) {
        if let Some((_, ip_end)) = self.ip_header_range() {
            if self.tcp().is_some() {
                self.header_bytes[ip_end + 14..ip_end + 16].copy_from_slice(&window.to_be_bytes());
                if let Some(TransportMeta::Tcp { tcp, .. }) =
                    self.ipv4.as_mut().and_then(|ip| ip.transport.as_mut())
                {
                    tcp.window = window;
                }
            }
        }
    }

    /// Changes the TCP header length, growing the options region with zero
    /// bytes or truncating it so the stored bytes stay consistent with the
    /// data-offset field. The IPv4 total length and wire length move by the
    /// same amount, preserving the (untracked) payload size.
    pub fn set_tcp_data_offset(&mut self, data_offset: u8) {
        let data_offset = data_offset.clamp(5, 15);
        let Some((ip_start, ip_end)) = self.ip_header_range() else {
            return;
        };
        let Some(old) = self.tcp().map(|t| t.data_offset) else {
            return;
        };
        let new_end = ip_end + data_offset as usize * 4;
        self.header_bytes.resize(new_end, 0);
        self.header_bytes[ip_end + 12] =
            (data_offset << 4) | (self.header_bytes[ip_end + 12] & 0x0F);

        let grow = (data_offset as i64 - old as i64) * 4;
        let old_ip_total =
            u16::from_be_bytes([self.header_bytes[ip_start + 2], self.header_bytes[ip_start + 3]]);
        let new_ip_total = (i64::from(old_ip_total) + grow).clamp(0, 65535) as u16;
        self.header_bytes[ip_start + 2..ip_start + 4].copy_from_slice(&new_ip_total.to_be_bytes());
        self.total_len = (i64::from(self.total_len) + grow).max(new_end as i64) as u32;

        if let Some(TransportMeta::Tcp { tcp, .. }) =
            self.ipv4.as_mut().and_then(|ip| ip.transport.as_mut())
        {
            tcp.data_offset = data_offset;
        }
    }

    /// Sets the wire length, clipped below so it never claims fewer bytes
    /// than are stored. The IPv4 total-length field follows.
    pub fn set_total_len(&mut self, total_len: u32) {
        let floor = self.header_bytes.len() as u32;
        let new_total = total_len.max(floor).min(14 + 65535);
        if let Some((ip_start, _)) = self.ip_header_range() {
            let ip_total = (new_total - 14) as u16;
            self.header_bytes[ip_start + 2..ip_start + 4]
                .copy_from_slice(&ip_total.to_be_bytes());
        }
        self.total_len = new_total;
    }
}

/// One capture file: a labelled, time-ordered packet list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaptureFile {
    pub label: String,
    /// Provenance key of the source capture (manifest path, possibly with a
    /// segment suffix). Distinguishes captures that share a label.
    pub origin_id: String,
    pub packets: Vec<PacketRecord>,
}

/// Directional 5-tuple flow key.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FlowKey {
    pub src_ip: Ipv4Addr,
    pub dst_ip: Ipv4Addr,
    pub src_port: u16,
    pub dst_port: u16,
    pub protocol: u8,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Flow {
    pub packet_count: u64,
    pub byte_count: u64,
    pub inter_arrival_micros: Vec<u64>,
    pub packet_sizes: Vec<u32>,
}

/// Packets grouped by 5-tuple. Only IPv4 TCP/UDP packets form flows; the
/// rest are skipped and counted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FlowTable {
    pub flows: BTreeMap<FlowKey, Flow>,
    pub non_flow_packets: usize,
}

/// Output of the dataset preparation pipeline: two labels held out whole,
/// the rest split per label into training and auxiliary halves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetSplit {
    pub training: Vec<CaptureFile>,
    pub auxiliary: Vec<CaptureFile>,
    pub non_training: Vec<CaptureFile>,
    pub holdout_labels: Vec<String>,
    pub seed: u64,
}
