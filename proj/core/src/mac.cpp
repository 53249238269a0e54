#include "mcswarm/mac.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace mcswarm {

std::vector<std::uint8_t> serialize_frame(const Frame& frame, int n_nodes) {
    std::size_t ack_bytes = (static_cast<std::size_t>(n_nodes) - 1 + 7) / 8;
    std::vector<std::uint8_t> out;
    out.reserve(2 + ack_bytes + frame.payload.size());
    out.push_back(static_cast<std::uint8_t>(frame.header.sender));
    for (std::size_t b = 0; b < ack_bytes; ++b) {
        std::uint8_t byte = 0;
        for (int bit = 0; bit < 8; ++bit) {
            std::size_t idx = b * 8 + bit;
            if (idx < frame.header.acks.size() && frame.header.acks[idx]) byte |= 1u << bit;
        }
        out.push_back(byte);
    }
    out.push_back(static_cast<std::uint8_t>(frame.kind));
    out.insert(out.end(), frame.payload.begin(), frame.payload.end());
    return out;
}

Frame deserialize_frame(std::span<const std::uint8_t> bytes, int n_nodes) {
    std::size_t ack_bytes = (static_cast<std::size_t>(n_nodes) - 1 + 7) / 8;
    if (bytes.size() < 2 + ack_bytes) throw std::invalid_argument("frame: truncated");
    Frame frame;
    frame.header.sender = bytes[0];
    frame.header.acks.assign(n_nodes - 1, false);
    for (std::size_t i = 0; i < frame.header.acks.size(); ++i) {
        frame.header.acks[i] = (bytes[1 + i / 8] >> (i % 8)) & 1u;
    }
    std::uint8_t tag = bytes[1 + ack_bytes];
    if (tag > static_cast<std::uint8_t>(FrameKind::CellStatus))
        throw std::invalid_argument("frame: unknown kind tag");
    frame.kind = static_cast<FrameKind>(tag);
    frame.payload.assign(bytes.begin() + 2 + ack_bytes, bytes.end());
    return frame;
}

int MacNode::bit_index(int slot, int own_slot) {
    return slot < own_slot ? slot : slot - 1;
}

MacNode::MacNode(int node_id, int own_slot, int n_nodes, int retx_threshold,
                 std::vector<BufferConfig> buffers)
    : node_id_(node_id),
      own_slot_(own_slot),
      n_nodes_(n_nodes),
      retx_threshold_(retx_threshold),
      recv_bits_(static_cast<std::size_t>(n_nodes - 1), false) {
    if (n_nodes < 1) throw std::invalid_argument("mac: need at least one node");
    std::set<int> prios;
    std::set<int> ids;
    for (const auto& cfg : buffers) {
        if (!prios.insert(cfg.priority).second)
            throw std::invalid_argument("mac: duplicate buffer priority " +
                                        std::to_string(cfg.priority));
        if (!ids.insert(cfg.id).second)
            throw std::invalid_argument("mac: duplicate buffer id " + std::to_string(cfg.id));
        if (cfg.ttl_slots && *cfg.ttl_slots == 0)
            throw std::invalid_argument("mac: TTL must be > 0");
    }
    std::sort(buffers.begin(), buffers.end(),
              [](const BufferConfig& a, const BufferConfig& b) { return a.priority < b.priority; });
    for (const auto& cfg : buffers) {
        MacBuffer buf;
        buf.config = cfg;
        buf.delivery_bits.assign(static_cast<std::size_t>(n_nodes - 1), false);
        buffers_.push_back(std::move(buf));
    }
}

MacBuffer& MacNode::buffer_mut(int buffer_id) {
    for (auto& buf : buffers_) {
        if (buf.config.id == buffer_id) return buf;
    }
    throw std::invalid_argument("mac: unknown buffer id " + std::to_string(buffer_id));
}

const MacBuffer& MacNode::buffer(int buffer_id) const {
    return const_cast<MacNode*>(this)->buffer_mut(buffer_id);
}

std::size_t MacNode::queued_total() const {
    std::size_t n = 0;
    for (const auto& buf : buffers_) n += buf.queue.size();
    return n;
}

void MacNode::enqueue(int buffer_id, FrameKind kind, std::vector<std::uint8_t> payload,
                      std::uint64_t now_slot) {
    MacBuffer& buf = buffer_mut(buffer_id);
    if (buf.queue.empty())
        std::fill(buf.delivery_bits.begin(), buf.delivery_bits.end(), false);
    MacMessage msg;
    msg.kind = kind;
    msg.payload = std::move(payload);
    msg.enqueue_slot = now_slot;
    msg.ttl_slots = buf.config.ttl_slots;
    msg.seq = next_seq_++;
    buf.queue.push_back(std::move(msg));
}

void MacNode::enqueue_replacing_unsent(int buffer_id, FrameKind kind,
                                       std::vector<std::uint8_t> payload,
                                       std::uint64_t now_slot) {
    MacBuffer& buf = buffer_mut(buffer_id);
    bool head_removed = !buf.queue.empty() && buf.queue.front().tx_count == 0;
    std::erase_if(buf.queue, [](const MacMessage& m) { return m.tx_count == 0; });
    if (head_removed) {
        std::fill(buf.delivery_bits.begin(), buf.delivery_bits.end(), false);
        if (last_tx_ && last_tx_->buffer_id == buffer_id) last_tx_.reset();
    }
    enqueue(buffer_id, kind, std::move(payload), now_slot);
}

void MacNode::pop_head(MacBuffer& buf) {
    if (last_tx_ && last_tx_->buffer_id == buf.config.id &&
        !buf.queue.empty() && buf.queue.front().seq == last_tx_->seq)
        last_tx_.reset();
    buf.queue.pop_front();
    std::fill(buf.delivery_bits.begin(), buf.delivery_bits.end(), false);
}

int MacNode::expire_ttl(std::uint64_t now_slot) {
    int removed = 0;
    for (auto& buf : buffers_) {
        bool head_changed = false;
        for (auto it = buf.queue.begin(); it != buf.queue.end();) {
            if (it->ttl_slots && now_slot - it->enqueue_slot >= *it->ttl_slots) {
                if (it == buf.queue.begin()) head_changed = true;
                if (last_tx_ && last_tx_->buffer_id == buf.config.id && last_tx_->seq == it->seq)
                    last_tx_.reset();
                it = buf.queue.erase(it);
                ++removed;
            } else {
                ++it;
            }
        }
        if (head_changed)
            std::fill(buf.delivery_bits.begin(), buf.delivery_bits.end(), false);
    }
    return removed;
}

void MacNode::enter_hi() {
    mode_ = Criticality::HI;
    // LO-criticality traffic is dropped at the transition.
    for (auto& buf : buffers_) {
        if (buf.config.criticality == Criticality::LO && !buf.queue.empty()) {
            if (last_tx_ && last_tx_->buffer_id == buf.config.id) last_tx_.reset();
            buf.queue.clear();
            std::fill(buf.delivery_bits.begin(), buf.delivery_bits.end(), false);
        }
    }
}

Frame MacNode::select_frame() {
    Frame frame;
    frame.header.sender = node_id_;
    frame.header.acks = recv_bits_;
    frame.sender_mode = mode_;
    for (auto& buf : buffers_) {  // priority order
        if (buf.queue.empty()) continue;
        if (mode_ == Criticality::HI && buf.config.criticality == Criticality::LO) continue;
        const MacMessage& head = buf.queue.front();
        frame.kind = head.kind;
        frame.payload = head.payload;
        frame.buffer_id = buf.config.id;
        return frame;
    }
    // Nothing eligible: end of busy period.
    busy_period_len_ = 0;
    retransmissions_ = 0;
    mode_ = Criticality::LO;
    last_tx_.reset();
    frame.kind = FrameKind::NoOp;
    frame.sender_mode = mode_;
    return frame;
}

Frame MacNode::on_own_slot(std::uint64_t now_slot) {
    expire_ttl(now_slot);
    Frame frame = select_frame();
    if (frame.is_noop()) return frame;

    MacBuffer& buf = buffer_mut(frame.buffer_id);
    MacMessage& head = buf.queue.front();
    frame.retransmission = head.tx_count >= 1;
    head.tx_count += 1;
    busy_period_len_ += 1;
    if (frame.retransmission) retransmissions_ += 1;
    last_tx_ = LastTx{buf.config.id, head.seq};
    if (buf.delivery_bits.empty()) pop_head(buf);  // N == 1: no peers to confirm
    if (mode_ == Criticality::LO && retransmissions_ > retx_threshold_) enter_hi();
    return frame;
}

std::optional<Delivered> MacNode::on_receive(const Frame& frame, int slot_of_sender) {
    if (slot_of_sender == own_slot_) return std::nullopt;  // unexpected, ignore
    recv_bits_[bit_index(slot_of_sender, own_slot_)] = true;

    // The sender's ack bit for our slot confirms it received whatever we sent
    // in our last own slot.
    int my_bit = bit_index(own_slot_, slot_of_sender);
    if (last_tx_ && my_bit < static_cast<int>(frame.header.acks.size()) &&
        frame.header.acks[my_bit]) {
        MacBuffer& buf = buffer_mut(last_tx_->buffer_id);
        if (!buf.queue.empty() && buf.queue.front().seq == last_tx_->seq) {
            buf.delivery_bits[bit_index(slot_of_sender, own_slot_)] = true;
            bool all_set = std::all_of(buf.delivery_bits.begin(), buf.delivery_bits.end(),
                                       [](bool b) { return b; });
            if (all_set) pop_head(buf);
        }
    }

    if (frame.is_noop()) return std::nullopt;
    return Delivered{frame.header.sender, frame.kind, frame.payload};
}

void MacNode::on_foreign_slot_silence(int slot) {
    if (slot == own_slot_) return;
    recv_bits_[bit_index(slot, own_slot_)] = false;
}

}  // namespace mcswarm
