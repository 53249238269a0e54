#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mcswarm {

enum class Criticality : std::uint8_t { LO = 0, HI = 1 };

inline const char* to_string(Criticality c) { return c == Criticality::LO ? "LO" : "HI"; }

/// Wire payload kinds. NoOp frames carry only the acknowledgement header.
enum class FrameKind : std::uint8_t { NoOp = 0, Position = 1, CellStatus = 2 };

struct MacMessage {
    FrameKind kind = FrameKind::NoOp;
    std::vector<std::uint8_t> payload;
    std::uint64_t enqueue_slot = 0;
    std::optional<std::uint32_t> ttl_slots;  // absent: never expires
    std::uint32_t tx_count = 0;
    std::uint64_t seq = 0;  // node-local id, identifies the exact message
};

struct BufferConfig {
    int id = 0;
    int priority = 0;  // lower number = higher priority; ties are rejected
    Criticality criticality = Criticality::HI;
    std::optional<std::uint32_t> ttl_slots;  // default TTL for enqueued messages
};

struct MacBuffer {
    BufferConfig config;
    std::deque<MacMessage> queue;
    std::vector<bool> delivery_bits;  // N-1 bits, tracks the head message only
};

struct FrameHeader {
    int sender = 0;
    std::vector<bool> acks;  // snapshot of the sender's recv_bits, N-1 bits
};

struct Frame {
    FrameHeader header;
    FrameKind kind = FrameKind::NoOp;
    std::vector<std::uint8_t> payload;

    // Trace metadata, not part of the wire format.
    int buffer_id = -1;
    bool retransmission = false;
    Criticality sender_mode = Criticality::LO;

    bool is_noop() const { return kind == FrameKind::NoOp; }
};

/// Wire format: sender id (1 byte), ack bit-field (ceil((N-1)/8) bytes,
/// LSB-first, bit j = slot-table position j skipping the sender's own slot),
/// kind tag (1 byte), then the payload bytes.
std::vector<std::uint8_t> serialize_frame(const Frame& frame, int n_nodes);
Frame deserialize_frame(std::span<const std::uint8_t> bytes, int n_nodes);

/// A payload handed up to the application after reception.
struct Delivered {
    int sender = 0;
    FrameKind kind = FrameKind::NoOp;
    std::vector<std::uint8_t> payload;
};

/// Per-node state of the slot-based mixed-criticality broadcast MAC.
///
/// Each node owns one exclusive slot in a periodic table of length N. Frames
/// carry a bit-field of delayed acknowledgements (one bit per foreign slot,
/// set iff a frame was received in that slot's last occurrence). A buffered
/// message is removed once every other node has confirmed reception of it.
/// Retransmissions beyond retx_threshold within a busy period switch the node
/// to HI criticality; an own slot with nothing eligible to send resets the
/// counters and returns it to LO.
class MacNode {
public:
    MacNode(int node_id, int own_slot, int n_nodes, int retx_threshold,
            std::vector<BufferConfig> buffers);

    /// Append a message to the named buffer. TTL defaults to the buffer's
    /// configured TTL. Throws std::invalid_argument on unknown buffer id.
    void enqueue(int buffer_id, FrameKind kind, std::vector<std::uint8_t> payload,
                 std::uint64_t now_slot);

    /// Like enqueue, but first drops every not-yet-transmitted message in the
    /// buffer. Used for traffic where only the latest value matters.
    void enqueue_replacing_unsent(int buffer_id, FrameKind kind,
                                  std::vector<std::uint8_t> payload, std::uint64_t now_slot);

    /// Drop every queued message whose TTL has elapsed. Returns the number
    /// of messages removed.
    int expire_ttl(std::uint64_t now_slot);

    /// Produce this node's broadcast for its own slot: runs TTL expiry,
    /// selects the head of the highest-priority eligible buffer (Data) or
    /// resets the counters and returns to LO (NoOp). Updates the busy-period
    /// and retransmission counters and applies the LO->HI transition.
    Frame on_own_slot(std::uint64_t now_slot);

    /// Process a frame delivered by the channel during a foreign slot.
    /// Returns the payload to hand up for Data frames.
    std::optional<Delivered> on_receive(const Frame& frame, int slot_of_sender);

    /// A foreign slot passed with nothing received: clear its recv bit.
    void on_foreign_slot_silence(int slot);

    Criticality mode() const { return mode_; }
    int node_id() const { return node_id_; }
    int own_slot() const { return own_slot_; }
    int retransmissions() const { return retransmissions_; }
    int busy_period_len() const { return busy_period_len_; }
    const std::vector<bool>& recv_bits() const { return recv_bits_; }
    const MacBuffer& buffer(int buffer_id) const;
    const std::vector<MacBuffer>& buffers() const { return buffers_; }
    std::size_t queued_total() const;

    /// Bit-field position for a foreign slot, skipping own_slot.
    static int bit_index(int slot, int own_slot);

private:
    MacBuffer& buffer_mut(int buffer_id);
    Frame select_frame();
    void enter_hi();
    void pop_head(MacBuffer& buf);

    int node_id_;
    int own_slot_;
    int n_nodes_;
    int retx_threshold_;
    std::vector<MacBuffer> buffers_;  // sorted by priority, best first
    std::vector<bool> recv_bits_;     // N-1 bits
    int busy_period_len_ = 0;
    int retransmissions_ = 0;
    Criticality mode_ = Criticality::LO;
    std::uint64_t next_seq_ = 0;

    struct LastTx {
        int buffer_id;
        std::uint64_t seq;
    };
    std::optional<LastTx> last_tx_;
};

}  // namespace mcswarm
