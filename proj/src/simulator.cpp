#include "wbsn/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "wbsn/csv.hpp"
#include "wbsn/medium.hpp"
#include "wbsn/tdma.hpp"

namespace wbsn {

std::string_view to_string(EventKind k) noexcept {
  switch (k) {
    case EventKind::beacon: return "beacon";
    case EventKind::sample_tick: return "sample_tick";
    case EventKind::conversion_start: return "conversion_start";
    case EventKind::conversion_done: return "conversion_done";
    case EventKind::frame_ready: return "frame_ready";
    case EventKind::slot_start: return "slot_start";
    case EventKind::rssi_sample: return "rssi_sample";
    case EventKind::tx_start: return "tx_start";
    case EventKind::tx_end: return "tx_end";
    case EventKind::rx_start: return "rx_start";
    case EventKind::rx_end: return "rx_end";
    case EventKind::rx_deliver: return "rx_deliver";
    case EventKind::rx_collision: return "rx_collision";
    case EventKind::serial_start: return "serial_start";
    case EventKind::usb_start: return "usb_start";
    case EventKind::serial_out: return "serial_out";
  }
  return "?";
}

std::int16_t sense_and_quantize(const SensorModel& sensor, double t, Xoshiro256& rng) {
  double noise = rng.normal();
  double value = sensor.trace.at(t) + sensor.noise_sigma_c * noise;
  double lo = std::ceil(sensor.min_c / sensor.resolution_c);
  double hi = std::floor(sensor.max_c / sensor.resolution_c);
  double counts = std::clamp(std::round(value / sensor.resolution_c), lo, hi);
  return static_cast<std::int16_t>(counts);
}

namespace {

struct Queued {
  double time;
  std::uint64_t seq;
  EventKind kind;
  std::uint32_t entity;
  std::uint64_t aux;
};

struct Later {
  bool operator()(const Queued& a, const Queued& b) const {
    return std::tie(a.time, a.seq) > std::tie(b.time, b.seq);
  }
};

/// Min-heap on (time, insertion sequence).
class EventQueue {
 public:
  void schedule(double time, EventKind kind, std::uint32_t entity, std::uint64_t aux = 0) {
    if (time < now_) throw std::logic_error("event scheduled in the past");
    heap_.push({time, next_seq_++, kind, entity, aux});
  }
  bool empty() const { return heap_.empty(); }
  Queued pop() {
    Queued e = heap_.top();
    heap_.pop();
    now_ = e.time;
    return e;
  }

 private:
  std::priority_queue<Queued, std::vector<Queued>, Later> heap_;
  std::uint64_t next_seq_ = 0;
  double now_ = 0;
};

/// Accrues a device's energy into a ledger each time its state changes.
class Meter {
 public:
  Meter(Device device, PowerState initial) : device_(device), state_(initial) {}

  void set(PowerState next, double now, EnergyLedger& ledger, const DevicePowerProfile& profile) {
    ledger = accrue(ledger, profile, device_, state_, now - since_);
    state_ = next;
    since_ = now;
  }
  void flush(double now, EnergyLedger& ledger, const DevicePowerProfile& profile) {
    set(state_, now, ledger, profile);
  }

 private:
  Device device_;
  PowerState state_;
  double since_ = 0;
};

struct InFlight {
  std::uint32_t node = 0;
  std::uint16_t sequence = 0;
  std::int16_t raw = 0;
  double conv_start = 0, conv_done = 0, frame_ready = 0, sense = 0;
  double tx_start = 0, tx_end = 0, arrival_end = 0, serial_start = 0, usb_start = 0;
  unsigned retries = 0;
  FrameWord word{};
};

struct NodeRuntime {
  NodeConfig cfg;
  std::string hex;
  SensorModel sensor;
  Xoshiro256 rng;
  MacState mac;
  std::optional<double> last_beacon;
  std::uint16_t next_sequence = 0;
  std::optional<std::uint64_t> pending_packet;
  EnergyLedger ledger;
  Meter radio{Device::radio, PowerState::idle};
  Meter sensor_meter{Device::sensor, PowerState::idle};
  Meter mcu{Device::mcu, PowerState::idle};

  NodeRuntime(NodeConfig c, std::uint64_t seed) : cfg(std::move(c)), rng(seed) {}
};

constexpr std::uint64_t kNoPacket = ~std::uint64_t{0};

class Simulation {
 public:
  explicit Simulation(const ScenarioConfig& config)
      : cfg_(config), medium_(config.range_m, config.delay) {
    validate(cfg_);
    if (cfg_.mac_mode == MacMode::tdma) schedule_ = schedule_for(cfg_);
    for (const auto& n : cfg_.nodes) {
      std::uint64_t mix = cfg_.seed ^ (n.id.serial * 0xD6E8FEB86659FD93ull) ^ n.id.family_code;
      NodeRuntime rt(n, splitmix64(mix));
      rt.hex = to_hex(n.id);
      rt.sensor.conversion_time_s = cfg_.delay.sensor_conversion_s;
      rt.sensor.noise_sigma_c = cfg_.noise_sigma_c;
      rt.sensor.trace = n.trace;
      rt.mac.self = n.id;
      nodes_.push_back(std::move(rt));
    }
    ap_entity_ = static_cast<std::uint32_t>(nodes_.size());
    interferer_entity_ = ap_entity_ + 1;
  }

  ScenarioResult run() {
    const double duration = cfg_.duration_s;
    if (cfg_.mac_mode == MacMode::tdma && duration > 0) queue_.schedule(0.0, EventKind::beacon, ap_entity_, 0);
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
      double first = nodes_[i].cfg.phase_s;
      if (first < duration) queue_.schedule(first, EventKind::sample_tick, i, 0);
    }
    if (cfg_.interferer.enabled && cfg_.interferer.offset_s < duration)
      queue_.schedule(cfg_.interferer.offset_s, EventKind::tx_start, interferer_entity_, 0);

    double last = 0;
    while (!queue_.empty()) {
      auto e = queue_.pop();
      last = e.time;
      dispatch(e);
    }

    result_.end_time_s = std::max(duration, last);
    for (auto& n : nodes_) {
      n.radio.flush(result_.end_time_s, n.ledger, cfg_.power);
      n.sensor_meter.flush(result_.end_time_s, n.ledger, cfg_.power);
      n.mcu.flush(result_.end_time_s, n.ledger, cfg_.power);
      result_.node_ledgers[n.cfg.id] = n.ledger;
    }
    ap_radio_.flush(result_.end_time_s, result_.ap_ledger, cfg_.power);
    return std::move(result_);
  }

 private:
  std::string subject(std::uint32_t entity) const {
    if (entity < nodes_.size()) return nodes_[entity].hex;
    return entity == ap_entity_ ? "ap" : "interferer";
  }

  void log(const Queued& e, EventKind kind, std::string detail = {}) {
    result_.events.push_back({e.time, e.seq, kind, subject(e.entity), std::move(detail)});
  }

  double prep_lead() const { return cfg_.delay.sensor_conversion_s + mcu_prep_delay(cfg_.delay); }

  void dispatch(const Queued& e) {
    switch (e.kind) {
      case EventKind::beacon: on_beacon(e); break;
      case EventKind::sample_tick: on_tick(e); break;
      case EventKind::conversion_start: on_conversion_start(e); break;
      case EventKind::conversion_done: on_conversion_done(e); break;
      case EventKind::frame_ready: on_frame_ready(e); break;
      case EventKind::slot_start: on_slot_start(e); break;
      case EventKind::rssi_sample: on_rssi(e); break;
      case EventKind::tx_start: on_tx_start(e); break;
      case EventKind::tx_end: on_tx_end(e); break;
      case EventKind::rx_start: on_rx_start(e); break;
      case EventKind::rx_end: on_rx_end(e); break;
      case EventKind::serial_start:
      case EventKind::usb_start: on_forward_stage(e); break;
      case EventKind::serial_out: on_serial_out(e); break;
      case EventKind::rx_deliver:
      case EventKind::rx_collision: throw std::logic_error("outcome kinds are never queued");
    }
  }

  void on_beacon(const Queued& e) {
    log(e, EventKind::beacon, "frame=" + std::to_string(e.aux));
    for (auto& n : nodes_) {
      if (!medium_.in_range(n.cfg.distance_m)) continue;
      n.mac = synchronize(n.mac, e.time, schedule_);
      n.last_beacon = e.time;
    }
    double next = static_cast<double>(e.aux + 1) * schedule_.frame_period_s;
    if (next < cfg_.duration_s) queue_.schedule(next, EventKind::beacon, ap_entity_, e.aux + 1);
  }

  void on_tick(const Queued& e) {
    auto& n = nodes_[e.entity];
    double next = static_cast<double>(e.aux + 1) * cfg_.sample_period_s + n.cfg.phase_s;
    if (next < cfg_.duration_s) queue_.schedule(next, EventKind::sample_tick, e.entity, e.aux + 1);

    double start = e.time;
    if (cfg_.mac_mode == MacMode::tdma) {
      if (!n.last_beacon) {
        ++result_.counters.unsynced_samples;
        return;
      }
      // Start converting just early enough to have the frame ready at the
      // node's first slot after a full conversion.
      auto idx = *schedule_.slot_of(n.cfg.id);
      double slot = next_slot_start(schedule_, idx, *n.last_beacon, e.time + prep_lead());
      start = std::max(e.time, slot - prep_lead());
    }
    auto id = next_packet_++;
    InFlight p;
    p.node = e.entity;
    packets_.emplace(id, p);
    ++result_.counters.samples;
    queue_.schedule(start, EventKind::conversion_start, e.entity, id);
  }

  void on_conversion_start(const Queued& e) {
    auto& n = nodes_[e.entity];
    auto& p = packets_.at(e.aux);
    p.conv_start = e.time;
    p.sequence = n.next_sequence++;
    p.raw = sense_and_quantize(n.sensor, e.time, n.rng);
    n.sensor_meter.set(PowerState::active, e.time, n.ledger, cfg_.power);
    log(e, EventKind::conversion_start, "seq=" + std::to_string(p.sequence));
    queue_.schedule(e.time + cfg_.delay.sensor_conversion_s, EventKind::conversion_done, e.entity, e.aux);
  }

  void on_conversion_done(const Queued& e) {
    auto& n = nodes_[e.entity];
    auto& p = packets_.at(e.aux);
    p.conv_done = e.time;
    n.sensor_meter.set(PowerState::idle, e.time, n.ledger, cfg_.power);
    n.mcu.set(PowerState::active, e.time, n.ledger, cfg_.power);
    log(e, EventKind::conversion_done,
        "seq=" + std::to_string(p.sequence) + ";raw=" + std::to_string(p.raw));
    queue_.schedule(e.time + mcu_prep_delay(cfg_.delay), EventKind::frame_ready, e.entity, e.aux);
  }

  void on_frame_ready(const Queued& e) {
    auto& n = nodes_[e.entity];
    auto& p = packets_.at(e.aux);
    p.frame_ready = e.time;
    p.word = encode_frame(n.cfg.id, p.raw, p.sequence);
    n.mcu.set(PowerState::idle, e.time, n.ledger, cfg_.power);
    log(e, EventKind::frame_ready, "seq=" + std::to_string(p.sequence));

    if (n.pending_packet) {
      ++result_.counters.dropped_frames;
      if (packets_.at(*n.pending_packet).sense > 0) {
        // Previous frame already owns the radio; this one is lost.
        packets_.erase(e.aux);
        return;
      }
      packets_.erase(*n.pending_packet);
    }
    n.pending_packet = e.aux;

    if (cfg_.mac_mode == MacMode::aloha) {
      p.sense = e.time;
      queue_.schedule(e.time + cfg_.delay.radio_switch_delay_s, EventKind::tx_start, e.entity, e.aux);
      return;
    }
    n.mac = enqueue_frame(n.mac, p.word);
    queue_.schedule(std::max(e.time, n.mac.next_slot_start_s), EventKind::slot_start, e.entity, e.aux);
  }

  void on_slot_start(const Queued& e) {
    auto& n = nodes_[e.entity];
    if (n.pending_packet != e.aux) return;  // superseded by a newer frame
    log(e, EventKind::slot_start, "seq=" + std::to_string(packets_.at(e.aux).sequence));
    auto step = mac_step(n.mac, e.time, std::nullopt, schedule_);
    n.mac = step.state;
    if (step.action == MacAction::start_rssi) {
      queue_.schedule(e.time, EventKind::rssi_sample, e.entity, e.aux);
    } else if (n.mac.phase == MacPhase::waiting_slot) {
      queue_.schedule(std::max(e.time, n.mac.next_slot_start_s), EventKind::slot_start, e.entity, e.aux);
    }
  }

  void on_rssi(const Queued& e) {
    auto& n = nodes_[e.entity];
    if (n.pending_packet != e.aux) return;
    bool busy = medium_.busy_at(e.time);
    log(e, EventKind::rssi_sample, busy ? "busy=1" : "busy=0");
    auto step = mac_step(n.mac, e.time, busy, schedule_);
    n.mac = step.state;
    auto& p = packets_.at(e.aux);
    if (step.action == MacAction::start_tx) {
      p.sense = e.time;
      queue_.schedule(e.time + cfg_.delay.radio_switch_delay_s, EventKind::tx_start, e.entity, e.aux);
    } else if (step.action == MacAction::defer_to_next_frame) {
      ++result_.counters.deferrals;
      ++p.retries;
      queue_.schedule(n.mac.next_slot_start_s, EventKind::slot_start, e.entity, e.aux);
    }
  }

  void on_tx_start(const Queued& e) {
    Transmission tx;
    tx.sender = e.entity;
    tx.start_s = e.time;
    std::uint64_t packet = kNoPacket;
    if (e.entity == interferer_entity_) {
      tx.end_s = e.time + cfg_.interferer.burst_s;
      tx.distance_m = cfg_.interferer.distance_m;
      log(e, EventKind::tx_start, "burst");
      double next = cfg_.interferer.offset_s + static_cast<double>(e.aux + 1) * cfg_.interferer.period_s;
      if (next < cfg_.duration_s) queue_.schedule(next, EventKind::tx_start, interferer_entity_, e.aux + 1);
    } else {
      auto& n = nodes_[e.entity];
      auto& p = packets_.at(e.aux);
      packet = e.aux;
      p.tx_start = e.time;
      tx.end_s = e.time + airtime(static_cast<double>(kFrameBits), cfg_.delay);
      tx.frame = p.word;
      tx.distance_m = n.cfg.distance_m;
      n.radio.set(PowerState::transmit, e.time, n.ledger, cfg_.power);
      log(e, EventKind::tx_start, to_hex(p.word));
    }
    ++result_.counters.transmissions;
    auto tx_id = medium_.add(tx);
    tx_packet_[tx_id] = packet;
    queue_.schedule(tx.end_s, EventKind::tx_end, e.entity, tx_id);
    if (medium_.in_range(tx.distance_m)) {
      auto window = medium_.arrival(tx);
      queue_.schedule(window.arrival_start_s, EventKind::rx_start, ap_entity_, tx_id);
      queue_.schedule(window.arrival_end_s, EventKind::rx_end, ap_entity_, tx_id);
    } else {
      ++result_.counters.out_of_range;
    }
  }

  void on_tx_end(const Queued& e) {
    log(e, EventKind::tx_end);
    auto packet = tx_packet_.at(e.aux);
    bool reaches_ap = medium_.in_range(medium_.get(e.aux).distance_m);
    if (!reaches_ap) {
      tx_packet_.erase(e.aux);
      medium_.prune(e.time - 1.0);
    }
    if (e.entity == interferer_entity_) return;
    auto& n = nodes_[e.entity];
    n.radio.set(PowerState::idle, e.time, n.ledger, cfg_.power);
    if (auto it = packets_.find(packet); it != packets_.end()) it->second.tx_end = e.time;
    if (cfg_.mac_mode == MacMode::tdma) n.mac = complete_transmission(n.mac);
    if (n.pending_packet == packet) n.pending_packet.reset();
    if (!reaches_ap) packets_.erase(packet);
  }

  void on_rx_start(const Queued& e) {
    const auto& tx = medium_.get(e.aux);
    if (active_receptions_++ == 0) ap_radio_.set(PowerState::receive, e.time, result_.ap_ledger, cfg_.power);
    log(e, EventKind::rx_start, "from=" + subject(tx.sender));
  }

  void on_rx_end(const Queued& e) {
    const Transmission tx = medium_.get(e.aux);
    if (--active_receptions_ == 0) ap_radio_.set(PowerState::idle, e.time, result_.ap_ledger, cfg_.power);
    auto outcome = medium_.outcome(e.aux);
    auto packet = tx_packet_.at(e.aux);
    tx_packet_.erase(e.aux);
    medium_.prune(e.time - 1.0);

    std::string from = "from=" + subject(tx.sender);
    if (outcome.kind == DeliveryKind::collided) {
      ++result_.counters.collisions;
      log(e, EventKind::rx_collision, from);
      packets_.erase(packet);
      return;
    }
    auto plan = access_point_forward(tx.frame, e.time, cfg_.delay, &result_.counters.corruption);
    if (!plan || packet == kNoPacket) {
      log(e, EventKind::rx_deliver, from + ";corrupt=" + std::string(to_string(decode_frame(tx.frame).error)));
      packets_.erase(packet);
      return;
    }
    ++result_.counters.deliveries;
    auto& p = packets_.at(packet);
    p.arrival_end = e.time;
    log(e, EventKind::rx_deliver, from + ";seq=" + std::to_string(p.sequence));
    queue_.schedule(plan->serial_start_s, EventKind::serial_start, ap_entity_, packet);
    queue_.schedule(plan->usb_start_s, EventKind::usb_start, ap_entity_, packet);
    queue_.schedule(plan->serial_out_s, EventKind::serial_out, ap_entity_, packet);
  }

  std::string packet_detail(const InFlight& p) const {
    return "from=" + nodes_[p.node].hex + ";seq=" + std::to_string(p.sequence);
  }

  void on_forward_stage(const Queued& e) {
    auto& p = packets_.at(e.aux);
    (e.kind == EventKind::serial_start ? p.serial_start : p.usb_start) = e.time;
    log(e, e.kind, packet_detail(p));
  }

  void on_serial_out(const Queued& e) {
    auto p = packets_.at(e.aux);
    packets_.erase(e.aux);
    log(e, EventKind::serial_out, packet_detail(p));

    PacketRecord rec;
    rec.sensor_id = nodes_[p.node].cfg.id;
    rec.sequence = p.sequence;
    rec.raw = p.raw;
    rec.conversion_start_s = p.conv_start;
    rec.serial_out_s = e.time;
    rec.measured.terms = {
        p.frame_ready - p.conv_done,  p.tx_start - p.sense,       p.arrival_end - p.tx_end,
        p.tx_end - p.tx_start,        p.serial_start - p.arrival_end, p.usb_start - p.serial_start,
        p.conv_done - p.conv_start,   e.time - p.usb_start,
    };
    rec.measured.close();
    rec.queue_wait_s = p.sense - p.frame_ready;
    rec.end_to_end_s = e.time - p.conv_start;
    rec.retries = p.retries;
    result_.packets.push_back(rec);
    result_.readings.push_back(make_reading(rec.sensor_id, e.time, p.raw, p.sequence, rec.end_to_end_s));
  }

  ScenarioConfig cfg_;
  SlotSchedule schedule_;
  Medium medium_;
  EventQueue queue_;
  std::vector<NodeRuntime> nodes_;
  std::uint32_t ap_entity_ = 0;
  std::uint32_t interferer_entity_ = 0;
  Meter ap_radio_{Device::radio, PowerState::idle};
  int active_receptions_ = 0;
  std::unordered_map<std::uint64_t, InFlight> packets_;
  std::unordered_map<Medium::TxId, std::uint64_t> tx_packet_;
  std::uint64_t next_packet_ = 0;
  ScenarioResult result_;
};

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& config) { return Simulation(config).run(); }

std::string events_csv(const std::vector<SimEvent>& events) {
  std::string out = csv_version_line("wbsn-events") + "\ntime_s,seq,kind,subject,detail\n";
  for (const auto& e : events) {
    out += format_double(e.time_s) + "," + std::to_string(e.seq) + "," + std::string(to_string(e.kind)) +
           "," + e.subject + "," + e.detail + "\n";
  }
  return out;
}

std::string readings_csv(const std::vector<Reading>& readings) {
  std::string out = csv_version_line("wbsn-readings") + "\n" + readings_csv_header() + "\n";
  for (const auto& r : readings) out += reading_csv_row(r) + "\n";
  return out;
}

std::string ledgers_csv(const ScenarioResult& result) {
  std::string out = csv_version_line("wbsn-ledgers") +
                    "\nentity,transmit_j,receive_j,idle_j,sensing_j,mcu_j,total_j\n";
  auto row = [&](const std::string& who, const EnergyLedger& l) {
    out += who + "," + format_double(l.transmit_j) + "," + format_double(l.receive_j) + "," +
           format_double(l.idle_j) + "," + format_double(l.sensing_j) + "," + format_double(l.mcu_j) +
           "," + format_double(l.total_j) + "\n";
  };
  for (const auto& [id, l] : result.node_ledgers) row(to_hex(id), l);
  row("ap", result.ap_ledger);
  return out;
}

std::string packets_csv(const std::vector<PacketRecord>& packets) {
  std::string out = csv_version_line("wbsn-packets") + "\nsensor_id_hex,sequence,conversion_start_s";
  for (std::size_t s = 1; s <= DelayBudget::kTerms; ++s) out += ",t" + std::to_string(s);
  out += ",total_s,queue_wait_s,end_to_end_s,retries\n";
  for (const auto& p : packets) {
    out += to_hex(p.sensor_id) + "," + std::to_string(p.sequence) + "," + format_double(p.conversion_start_s);
    for (double t : p.measured.terms) out += "," + format_double(t);
    out += "," + format_double(p.measured.total) + "," + format_double(p.queue_wait_s) + "," +
           format_double(p.end_to_end_s) + "," + std::to_string(p.retries) + "\n";
  }
  return out;
}

}  // namespace wbsn
