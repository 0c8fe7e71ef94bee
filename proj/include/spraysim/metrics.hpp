#pragma once
#include "spraysim/packet.hpp"
#include "spraysim/time.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace spraysim {

struct FlowRecord {
    uint32_t flow = 0;
    uint8_t cls = kClassSprayed;
    int32_t src = -1;
    int32_t dst = -1;
    uint64_t bytes = 0;
    SimTime start = kNoTime;
    SimTime end = kNoTime;
    SimTime ideal_fct = 0;
    uint32_t retransmits = 0;
    uint32_t trims = 0;
    uint32_t nacks = 0;
    uint32_t ecn_acks = 0;
    uint64_t sent_pkts = 0;       // data transmissions, retransmits included
    uint64_t rcv_pkts = 0;        // intact data receipts, duplicates included
    uint64_t delivered_bytes = 0;  // first-time payload only

    bool complete() const { return end != kNoTime; }
    SimTime fct() const { return end - start; }
};

struct QueueSample {
    SimTime at;
    int32_t link;
    uint8_t cls;
    uint32_t pkts;
    uint64_t bytes;
};

// Single collector per run, fed synchronously from the event loop. Per-link
// depth state is authoritative here so the sampler never has to poll ports.
class Metrics {
public:
    Metrics(int n_links, int n_flows);

    // flow lifecycle
    void flow_started(uint32_t flow, SimTime now);
    void flow_finished(uint32_t flow, SimTime now);

    // counters
    void count_trim(uint32_t flow) { ++_trims_total; ++_rec[flow].trims; }
    void count_control_drop() { ++_control_drops; }
    void count_nack(uint32_t flow) { ++_nacks_total; ++_rec[flow].nacks; }
    void count_ecn_ack(uint32_t flow) { ++_ecn_acks_total; ++_rec[flow].ecn_acks; }
    void count_ecn_mark() { ++_ecn_marks; }
    void count_retransmit(uint32_t flow) { ++_retx_total; ++_rec[flow].retransmits; }
    void count_ev_remap() { ++_ev_remaps; }
    void count_rto() { ++_rto_fires; }
    void count_data_send(uint32_t flow) { ++_rec[flow].sent_pkts; }
    void count_intact_rcv(uint32_t flow) { ++_rec[flow].rcv_pkts; }
    void count_delivered(uint32_t flow, uint32_t bytes) { _rec[flow].delivered_bytes += bytes; }

    // queue accounting, exact: integrates depth over time between changes
    void on_queue_change(int link, int cls, int dpkts, int64_t dbytes, SimTime now);
    void on_dequeue_bytes(int link, uint32_t flow, uint32_t bytes);
    void set_record_port_flow_bytes(bool b) { _record_port_flow = b; }

    uint32_t depth_pkts(int link, int cls) const { return _depth_pkts[link * kClassCount + cls]; }
    uint64_t depth_bytes(int link, int cls) const { return _depth_bytes[link * kClassCount + cls]; }
    uint32_t max_depth_pkts(int link) const { return _max_pkts[link]; }
    uint64_t max_depth_bytes(int link) const { return _max_bytes[link]; }
    // time-average of total data depth in bytes over [0, horizon]
    double avg_depth_bytes(int link, SimTime horizon) const;

    void add_sample(const QueueSample& s) { _samples.push_back(s); }
    const std::vector<QueueSample>& samples() const { return _samples; }

    FlowRecord& rec(uint32_t flow) { return _rec[flow]; }
    const std::vector<FlowRecord>& records() const { return _rec; }
    size_t incomplete_flows() const;

    uint64_t trims_total() const { return _trims_total; }
    uint64_t control_drops() const { return _control_drops; }
    uint64_t nacks_total() const { return _nacks_total; }
    uint64_t ecn_acks_total() const { return _ecn_acks_total; }
    uint64_t ecn_marks() const { return _ecn_marks; }
    uint64_t retx_total() const { return _retx_total; }
    uint64_t ev_remaps() const { return _ev_remaps; }
    uint64_t rto_fires() const { return _rto_fires; }

    const std::map<std::pair<int, uint32_t>, uint64_t>& port_flow_bytes() const {
        return _port_flow_bytes;
    }

private:
    std::vector<FlowRecord> _rec;
    std::vector<QueueSample> _samples;

    // indexed [link * kClassCount + cls]
    std::vector<uint32_t> _depth_pkts;
    std::vector<uint64_t> _depth_bytes;
    // per link, data classes only
    std::vector<uint32_t> _max_pkts;
    std::vector<uint64_t> _max_bytes;
    std::vector<uint64_t> _cur_data_bytes;
    std::vector<uint32_t> _cur_data_pkts;
    std::vector<double> _byte_time_integral;  // bytes * ps
    std::vector<SimTime> _last_change;

    bool _record_port_flow = false;
    std::map<std::pair<int, uint32_t>, uint64_t> _port_flow_bytes;

    uint64_t _trims_total = 0;
    uint64_t _control_drops = 0;
    uint64_t _nacks_total = 0;
    uint64_t _ecn_acks_total = 0;
    uint64_t _ecn_marks = 0;
    uint64_t _retx_total = 0;
    uint64_t _ev_remaps = 0;
    uint64_t _rto_fires = 0;
};

} // namespace spraysim
