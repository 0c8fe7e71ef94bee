#include "spraysim/metrics.hpp"

#include <cassert>

namespace spraysim {

Metrics::Metrics(int n_links, int n_flows)
    : _rec(n_flows),
      _depth_pkts((size_t)n_links * kClassCount, 0),
      _depth_bytes((size_t)n_links * kClassCount, 0),
      _max_pkts(n_links, 0),
      _max_bytes(n_links, 0),
      _cur_data_bytes(n_links, 0),
      _cur_data_pkts(n_links, 0),
      _byte_time_integral(n_links, 0.0),
      _last_change(n_links, 0) {
    for (int f = 0; f < n_flows; ++f)
        _rec[f].flow = (uint32_t)f;
}

void Metrics::flow_started(uint32_t flow, SimTime now) {
    if (_rec[flow].start == kNoTime)
        _rec[flow].start = now;
}

void Metrics::flow_finished(uint32_t flow, SimTime now) {
    assert(_rec[flow].end == kNoTime);
    _rec[flow].end = now;
}

void Metrics::on_queue_change(int link, int cls, int dpkts, int64_t dbytes, SimTime now) {
    size_t i = (size_t)link * kClassCount + cls;
    _depth_pkts[i] = (uint32_t)((int64_t)_depth_pkts[i] + dpkts);
    _depth_bytes[i] = (uint64_t)((int64_t)_depth_bytes[i] + dbytes);
    if (cls == kClassControl)
        return;
    // data-class aggregate, exact byte-time integral between changes
    _byte_time_integral[link] +=
        (double)_cur_data_bytes[link] * (double)(now - _last_change[link]);
    _last_change[link] = now;
    _cur_data_pkts[link] = (uint32_t)((int64_t)_cur_data_pkts[link] + dpkts);
    _cur_data_bytes[link] = (uint64_t)((int64_t)_cur_data_bytes[link] + dbytes);
    if (_cur_data_pkts[link] > _max_pkts[link])
        _max_pkts[link] = _cur_data_pkts[link];
    if (_cur_data_bytes[link] > _max_bytes[link])
        _max_bytes[link] = _cur_data_bytes[link];
}

void Metrics::on_dequeue_bytes(int link, uint32_t flow, uint32_t bytes) {
    if (_record_port_flow)
        _port_flow_bytes[{link, flow}] += bytes;
}

double Metrics::avg_depth_bytes(int link, SimTime horizon) const {
    if (horizon <= 0)
        return 0.0;
    double integral = _byte_time_integral[link] +
                      (double)_cur_data_bytes[link] * (double)(horizon - _last_change[link]);
    return integral / (double)horizon;
}

size_t Metrics::incomplete_flows() const {
    size_t n = 0;
    for (const FlowRecord& r : _rec)
        if (!r.complete())
            ++n;
    return n;
}

} // namespace spraysim
