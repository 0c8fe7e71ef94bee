#include "spraysim/net.hpp"

#include <cassert>

namespace spraysim {

void Pipe::inject(Packet pkt) {
    _inflight.push_back(pkt);
    _eng.schedule(_eng.now() + _topo.link(_link).delay, this);
}

void Pipe::on_event(SimTime, uint64_t) {
    assert(!_inflight.empty());
    Packet pkt = _inflight.front();
    _inflight.pop_front();
    _sink->receive(pkt, _link);
}

EgressPort::EgressPort(Engine& eng, const Topology& topo, int link_id, Pipe* out,
                       const PortConfig& cfg, Metrics* metrics)
    : _eng(eng),
      _topo(topo),
      _link(link_id),
      _out(out),
      _cfg(cfg),
      _metrics(metrics),
      _red_rng(eng.derive_rng((uint64_t)link_id, kRngRedMark)) {
    // quanta scaled so the smaller share still earns a full packet per turn
    int we = _cfg.wrr_ecmp_percent;
    int ws = 100 - we;
    int lo = we < ws ? we : ws;
    if (lo < 1)
        lo = 1;
    _quantum[0] = (int64_t)ws * kMtuBytes / lo;
    _quantum[1] = (int64_t)we * kMtuBytes / lo;
}

void EgressPort::account(int cls, int dpkts, int64_t dbytes, SimTime now) {
    _qpkts[cls] = (uint32_t)((int64_t)_qpkts[cls] + dpkts);
    _qbytes[cls] = (uint64_t)((int64_t)_qbytes[cls] + dbytes);
    if (_metrics)
        _metrics->on_queue_change(_link, cls, dpkts, dbytes, now);
}

void EgressPort::enqueue(Packet pkt, SimTime now) {
    int cls = pkt.cls;
    if (_cfg.policy == SchedPolicy::kFifo && cls == kClassEcmp)
        cls = kClassSprayed;  // single data FIFO under the default policy
    if (pkt.type != PktType::kData || pkt.trimmed)
        cls = kClassControl;

    if (cls != kClassControl && _cfg.trim_threshold_bytes > 0 &&
        _qbytes[cls] + pkt.bytes > _cfg.trim_threshold_bytes) {
        if (_metrics)
            _metrics->count_trim(pkt.flow);
        pkt.trimmed = true;
        pkt.bytes = kControlBytes;
        cls = kClassControl;
    }
    if (cls == kClassControl && _cfg.control_cap_bytes > 0 &&
        _qbytes[kClassControl] + pkt.bytes > _cfg.control_cap_bytes) {
        // feedback loss; the sender's timeout is the only recovery from here
        if (_metrics)
            _metrics->count_control_drop();
        return;
    }

    // queue membership is local to this port; pkt.cls survives for later hops
    _q[cls].push_back(pkt);
    account(cls, 1, pkt.bytes, now);
    if (!_busy)
        start_service(now);
}

int EgressPort::pick_wrr() {
    // classic DRR: a queue's turn lasts while its deficit covers the head
    for (int hop = 0; hop < 8; ++hop) {
        int q = _wrr_cur;
        std::deque<Packet>& dq = _q[q + 1];
        if (dq.empty()) {
            _deficit[q] = 0;
            _wrr_cur ^= 1;
            _fresh_turn = true;
            continue;
        }
        if (_fresh_turn) {
            _deficit[q] += _quantum[q];
            _fresh_turn = false;
        }
        if (_deficit[q] >= (int64_t)dq.front().bytes)
            return q + 1;
        _wrr_cur ^= 1;
        _fresh_turn = true;
    }
    return !_q[kClassSprayed].empty() ? kClassSprayed : kClassEcmp;
}

int EgressPort::pick_class() {
    if (!_q[kClassControl].empty())
        return kClassControl;
    bool s = !_q[kClassSprayed].empty();
    bool e = !_q[kClassEcmp].empty();
    if (s != e)
        return s ? kClassSprayed : kClassEcmp;
    if (_cfg.policy == SchedPolicy::kWrr)
        return pick_wrr();
    // SP: ecmp outranks sprayed; FIFO never has both populated
    return kClassEcmp;
}

void EgressPort::start_service(SimTime now) {
    int cls = pick_class();
    std::deque<Packet>& dq = _q[cls];
    assert(!dq.empty());
    Packet pkt = dq.front();
    dq.pop_front();
    // depth the packet saw at its dequeue instant, departing packet included
    uint64_t depth = _qbytes[cls];
    account(cls, -1, -(int64_t)pkt.bytes, now);
    if (cls != kClassControl && _cfg.policy == SchedPolicy::kWrr)
        _deficit[cls - 1] -= pkt.bytes;

    if (pkt.type == PktType::kData && !pkt.trimmed && _cfg.kmax_bytes > 0) {
        bool mark = false;
        if (depth >= _cfg.kmax_bytes) {
            mark = true;
        } else if (depth > _cfg.kmin_bytes) {
            double p = (double)(depth - _cfg.kmin_bytes) /
                       (double)(_cfg.kmax_bytes - _cfg.kmin_bytes);
            mark = _red_rng.next_double() < p;
        }
        if (mark) {
            pkt.ecn = true;
            if (_metrics)
                _metrics->count_ecn_mark();
        }
    }
    if (_metrics)
        _metrics->on_dequeue_bytes(_link, pkt.flow, pkt.bytes);

    _busy = true;
    _in_service = pkt;
    SimTime ser = serialization_ps(pkt.bytes, _topo.link(_link).effective_bps);
    _eng.schedule(now + ser, this);
}

void EgressPort::on_event(SimTime now, uint64_t) {
    _out->inject(_in_service);
    _busy = false;
    if (!_q[0].empty() || !_q[1].empty() || !_q[2].empty())
        start_service(now);
}

} // namespace spraysim
