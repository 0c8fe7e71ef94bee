#include "spraysim/host.hpp"

#include <cassert>

namespace spraysim {

namespace {
constexpr uint64_t kTagStart = 1;
constexpr uint64_t kTagFlush = 2;
constexpr uint64_t kTagRto = 3;

uint64_t make_tag(uint64_t kind, uint64_t idx) { return (kind << 32) | idx; }
} // namespace

HostNode::HostNode(Engine& eng, const Topology& topo, int host, EgressPort* nic,
                   const HostConfig& cfg, Metrics& metrics)
    : _eng(eng), _topo(topo), _host(host), _nic(nic), _cfg(cfg), _metrics(metrics) {}

EvGenerator& HostNode::generator_for(int dst_leaf) {
    auto it = _gen.find(dst_leaf);
    if (it != _gen.end())
        return it->second;
    // one shared generator per destination leaf; any host attached to it works
    // as the candidate probe since candidacy depends only on the leaf pair
    int probe = -1;
    for (int h = 0; h < _topo.n_hosts(); ++h) {
        if (_topo.leaf_of_host(h) == dst_leaf) {
            probe = h;
            break;
        }
    }
    assert(probe >= 0);
    auto cands = _topo.ev_candidates(_host, probe, !_cfg.oracle_notify);
    assert(!cands.empty());
    RngStream rng = _eng.derive_rng((uint64_t)_host,
                                    rng_purpose(kRngShuffle, (uint64_t)dst_leaf));
    auto [pos, ok] =
        _gen.emplace(dst_leaf, EvGenerator(std::move(cands), rng, _cfg.randomized_advance));
    (void)ok;
    return pos->second;
}

CongestionHistory* HostNode::history_for(int nparts) {
    assert(nparts >= 1 && nparts <= 2);
    auto& slot = _hist[nparts - 1];
    if (!slot) {
        uint32_t n = 1;
        for (int i = 0; i < nparts; ++i)
            n *= (uint32_t)_topo.ev_layout().count[i];
        // defaults scale with the route class: a NACK survives roughly one
        // BDP of sends, an ECN mark one sweep of the path space
        uint32_t bdp_pkts = (uint32_t)((_cfg.bdp_bytes + kMtuBytes - 1) / kMtuBytes);
        uint32_t p_nack = _cfg.p_nack ? _cfg.p_nack : (bdp_pkts ? bdp_pkts : 1);
        uint32_t p_ecn = _cfg.p_ecn;
        if (p_ecn == 0) {
            p_ecn = (bdp_pkts + n / 2) / n;
            if (p_ecn == 0)
                p_ecn = 1;
        }
        slot = std::make_unique<CongestionHistory>(n, _cfg.k_bits, p_ecn, p_nack,
                                                   _cfg.decay_step);
    }
    return slot.get();
}

const CongestionHistory* HostNode::history(int nparts) const {
    return _hist[nparts - 1].get();
}

uint64_t HostNode::steady_decays(int nparts) const {
    return _hist[nparts - 1] ? _hist[nparts - 1]->decay_calls() : 0;
}

bool HostNode::all_tx_done() const {
    for (const FlowTx& f : _tx)
        if (!f.done)
            return false;
    return true;
}

void HostNode::add_tx_flow(uint32_t flow_id, int dst, uint64_t bytes, SimTime start,
                           BalancerKind kind, uint8_t cls) {
    assert(bytes > 0);
    FlowTx f;
    f.id = flow_id;
    f.dst = dst;
    f.total_bytes = bytes;
    f.n_pkts = (bytes + kMtuBytes - 1) / kMtuBytes;
    f.st.assign(f.n_pkts, SeqState::kUnsent);
    f.cls = cls;

    BalancerEnv env;
    env.candidates = _topo.ev_candidates(_host, dst, !_cfg.oracle_notify);
    env.flow_id = flow_id;
    env.global_seed = _eng.global_seed();
    env.recycle_bound = (uint32_t)((_cfg.window_bytes + kMtuBytes - 1) / kMtuBytes);
    env.rng = _eng.derive_rng(flow_id, kRngBalancer);
    env.steady_draw_limit = _cfg.steady_draw_limit;
    if (!env.candidates.empty()) {
        int nparts = (int)env.candidates.size();
        std::vector<int> counts(_topo.ev_layout().count.begin(),
                                _topo.ev_layout().count.begin() + nparts);
        env.route_layout = EvLayout::from_counts(counts);
        if (kind == BalancerKind::kPrime || kind == BalancerKind::kCoPrime)
            env.shared_gen = &generator_for(_topo.leaf_of_host(dst));
        if (kind == BalancerKind::kPrime)
            env.history = history_for(nparts);
    }
    f.balancer = make_balancer(kind, std::move(env));

    int idx = (int)_tx.size();
    _tx.push_back(std::move(f));
    _tx_by_id[flow_id] = idx;
    _eng.schedule(start, this, make_tag(kTagStart, (uint64_t)idx));
}

void HostNode::add_rx_flow(uint32_t flow_id, int src, uint64_t bytes) {
    FlowRx r;
    r.id = flow_id;
    r.src = src;
    r.total_bytes = bytes;
    r.n_pkts = (bytes + kMtuBytes - 1) / kMtuBytes;
    r.got.assign(r.n_pkts, false);
    int idx = (int)_rx.size();
    _rx.push_back(std::move(r));
    _rx_by_id[flow_id] = idx;
}

void HostNode::send_data(FlowTx& f, uint64_t seq, bool is_rtx, SimTime now) {
    bool explore = f.sent_data < _cfg.explore_pkts;
    MpEv ev = f.balancer->select(explore);
    ++f.sent_data;

    Packet pkt;
    pkt.type = PktType::kData;
    pkt.cls = f.cls;
    pkt.flow = f.id;
    pkt.src = _host;
    pkt.dst = f.dst;
    pkt.seq = seq;
    pkt.bytes = pkt_size(f, seq);
    pkt.retransmit = is_rtx;
    // wire field: the route layout's low parts line up with the global slices
    uint16_t field = 0;
    for (int i = 0; i < ev.nparts; ++i)
        field |= (uint16_t)(ev.part[i] << _topo.ev_layout().shift[i]);
    pkt.ev = field;

    f.st[seq] = SeqState::kInFlight;
    f.in_flight += pkt.bytes;
    _metrics.count_data_send(f.id);
    if (is_rtx)
        _metrics.count_retransmit(f.id);
    if (!f.started) {
        f.started = true;
        _metrics.flow_started(f.id, now);
    }
    _nic->enqueue(pkt, now);
    arm_rto(f, now);
}

void HostNode::try_send(FlowTx& f, SimTime now) {
    while (true) {
        uint64_t seq;
        bool is_rtx;
        if (!f.rtx.empty()) {
            seq = f.rtx.front();
            is_rtx = true;
            // a cumulative ACK may have covered the seq after it was queued
            if (f.st[seq] != SeqState::kRtxPending) {
                f.rtx.erase(f.rtx.begin());
                continue;
            }
        } else if (f.next_new < f.n_pkts) {
            seq = f.next_new;
            is_rtx = false;
        } else {
            return;
        }
        if (f.in_flight + pkt_size(f, seq) > _cfg.window_bytes)
            return;
        if (is_rtx)
            f.rtx.erase(f.rtx.begin());
        else
            ++f.next_new;
        send_data(f, seq, is_rtx, now);
    }
}

void HostNode::arm_rto(FlowTx& f, SimTime now) {
    if (_cfg.rto <= 0 || f.done)
        return;
    if (f.rto_at != kNoTime)
        return;  // one outstanding check; it reschedules itself
    f.rto_at = now + _cfg.rto;
    _eng.schedule(f.rto_at, this, make_tag(kTagRto, (uint64_t)_tx_by_id[f.id]));
}

void HostNode::on_event(SimTime now, uint64_t tag) {
    uint64_t kind = tag >> 32;
    uint64_t idx = tag & 0xffffffffu;
    if (kind == kTagStart) {
        try_send(_tx[idx], now);
        return;
    }
    if (kind == kTagFlush) {
        FlowRx& r = _rx[idx];
        if (r.flush_at != now)
            return;  // superseded; a fresher timer or ACK already handled it
        r.flush_at = kNoTime;
        if (r.batch_pkts > 0)
            emit_ack(r, now);
        return;
    }
    assert(kind == kTagRto);
    FlowTx& f = _tx[idx];
    if (f.rto_at != now)
        return;
    f.rto_at = kNoTime;
    if (f.done)
        return;
    if (now - f.last_progress >= _cfg.rto) {
        // silent stall: refeed the first hole
        uint64_t hole = f.cum_ack;
        if (hole < f.n_pkts && f.st[hole] == SeqState::kInFlight) {
            _metrics.count_rto();
            f.in_flight -= pkt_size(f, hole);
            f.st[hole] = SeqState::kRtxPending;
            f.rtx.insert(f.rtx.begin(), hole);
            try_send(f, now);
        }
    }
    arm_rto(f, now);
}

void HostNode::receive(Packet pkt, int) {
    SimTime now = _eng.now();
    if (pkt.type == PktType::kData)
        on_data(pkt, now);
    else
        on_feedback(pkt, now);
}

void HostNode::on_data(Packet& pkt, SimTime now) {
    auto it = _rx_by_id.find(pkt.flow);
    assert(it != _rx_by_id.end());
    FlowRx& r = _rx[it->second];

    if (pkt.trimmed) {
        Packet nack;
        nack.type = PktType::kNack;
        nack.cls = kClassControl;
        nack.flow = pkt.flow;
        nack.src = _host;
        nack.dst = r.src;
        nack.seq = pkt.seq;
        nack.ev = pkt.ev;  // echo: both the penalty key and the return route
        nack.bytes = kControlBytes;
        _nic->enqueue(nack, now);
        return;
    }

    // receipts count toward the batch even when duplicated, so the sender's
    // in-flight ledger balances copy for copy
    ++r.batch_pkts;
    r.batch_bytes += pkt.bytes;
    r.last_ev = pkt.ev;
    r.batch_ecn = r.batch_ecn || pkt.ecn;
    if (_cfg.echo_all && r.echo_n < kMaxEcho) {
        r.echo_ev[r.echo_n] = pkt.ev;
        r.echo_ecn[r.echo_n] = pkt.ecn ? 1 : 0;
        ++r.echo_n;
    }
    _metrics.count_intact_rcv(r.id);

    if (!r.got[pkt.seq]) {
        r.got[pkt.seq] = true;
        ++r.distinct;
        _metrics.count_delivered(r.id, pkt.bytes);
        while (r.cum < r.n_pkts && r.got[r.cum])
            ++r.cum;
        if (r.distinct == r.n_pkts && !r.finished) {
            r.finished = true;
            _metrics.flow_finished(r.id, now);
        }
    }

    if (r.batch_pkts >= _cfg.coalesce_n) {
        emit_ack(r, now);
    } else if (r.flush_at == kNoTime) {
        r.flush_at = now + _cfg.flush_timeout;
        _eng.schedule(r.flush_at, this, make_tag(kTagFlush, (uint64_t)it->second));
    }
}

void HostNode::emit_ack(FlowRx& r, SimTime now) {
    Packet ack;
    ack.type = PktType::kAck;
    ack.cls = kClassControl;
    ack.flow = r.id;
    ack.src = _host;
    ack.dst = r.src;
    ack.bytes = kControlBytes;
    ack.ev = r.last_ev;
    ack.ecn = r.batch_ecn;
    ack.cum_ack = r.cum;
    ack.batch_pkts = (uint16_t)r.batch_pkts;
    ack.batch_bytes = r.batch_bytes;
    ack.echo_n = r.echo_n;
    ack.echo_ev = r.echo_ev;
    ack.echo_ecn = r.echo_ecn;
    r.batch_pkts = 0;
    r.batch_bytes = 0;
    r.batch_ecn = false;
    r.echo_n = 0;
    r.flush_at = kNoTime;  // any armed timer is now stale
    _nic->enqueue(ack, now);
}

void HostNode::on_feedback(Packet& pkt, SimTime now) {
    auto it = _tx_by_id.find(pkt.flow);
    if (it == _tx_by_id.end()) {
        ++_unknown_feedback;
        return;
    }
    FlowTx& f = _tx[it->second];
    f.last_progress = now;

    if (pkt.type == PktType::kNack) {
        _metrics.count_nack(f.id);
        f.balancer->on_nack(pkt.ev);
        if (f.st[pkt.seq] == SeqState::kInFlight) {
            f.in_flight -= pkt_size(f, pkt.seq);
            f.st[pkt.seq] = SeqState::kRtxPending;
            f.rtx.push_back(pkt.seq);
        }
        try_send(f, now);
        return;
    }

    ++_acks_rx;
    if (pkt.ecn)
        _metrics.count_ecn_ack(f.id);
    if (pkt.echo_n > 0) {
        for (uint8_t i = 0; i < pkt.echo_n; ++i)
            f.balancer->on_ack(pkt.echo_ev[i], pkt.echo_ecn[i] != 0);
    } else {
        f.balancer->on_ack(pkt.ev, pkt.ecn);
    }
    uint64_t released = pkt.batch_bytes;
    f.in_flight = f.in_flight >= released ? f.in_flight - released : 0;
    for (uint64_t s = f.cum_ack; s < pkt.cum_ack; ++s)
        f.st[s] = SeqState::kAcked;
    if (pkt.cum_ack > f.cum_ack)
        f.cum_ack = pkt.cum_ack;
    if (f.cum_ack == f.n_pkts)
        f.done = true;
    try_send(f, now);
}

} // namespace spraysim
