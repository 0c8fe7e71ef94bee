#pragma once
#include "spraysim/time.hpp"

#include <array>
#include <cstdint>

namespace spraysim {

constexpr uint32_t kMtuBytes = 4160;
constexpr uint32_t kControlBytes = 64;
constexpr int kMaxEcho = 8;

enum class PktType : uint8_t { kData, kAck, kNack };

// Egress traffic classes. Control (plus trimmed headers) rides strictly above
// data so feedback stays timely; classifying trimmed packets as control is
// what lets the NACK beat the retransmitted window.
enum TrafficClass : uint8_t {
    kClassControl = 0,
    kClassSprayed = 1,
    kClassEcmp = 2,
    kClassCount = 3,
};

struct Packet {
    PktType type = PktType::kData;
    uint8_t cls = kClassSprayed;
    bool ecn = false;
    bool trimmed = false;
    bool retransmit = false;
    uint16_t ev = 0;  // concatenated MP-EV header field; echoed on ACK/NACK
    uint32_t flow = 0;
    int32_t src = -1;
    int32_t dst = -1;
    uint64_t seq = 0;      // DATA sequence; on ACK/NACK the covered seq
    uint32_t bytes = 0;    // wire size
    // ACK bookkeeping: receipts covered by this (possibly coalesced) ACK
    uint64_t cum_ack = 0;     // contiguous packets received from 0
    uint16_t batch_pkts = 0;  // receipts acknowledged by this ACK
    uint32_t batch_bytes = 0; // their wire bytes, for window release
    // optional per-receipt echo: one (EV, mark) pair per coalesced packet,
    // so feedback lands on the path that earned it instead of the batch OR
    uint8_t echo_n = 0;
    std::array<uint16_t, kMaxEcho> echo_ev{};
    std::array<uint8_t, kMaxEcho> echo_ecn{};
};

} // namespace spraysim
