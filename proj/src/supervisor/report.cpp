#include "companion/supervisor/report.hpp"

#include <openssl/evp.h>

#include <stdexcept>

#include "companion/care/vitals.hpp"
#include "companion/protocol/codec.hpp"

namespace companion::supervisor {

namespace {

std::string to_hex(const unsigned char* md, unsigned int len) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xF];
  }
  return out;
}

}  // namespace

nlohmann::json report_to_json(const RunReport& r) {
  return {{"ticks", r.ticks},
          {"coverage_fraction", r.coverage_fraction},
          {"max_visit_count", r.max_visit_count},
          {"collisions", r.collisions},
          {"alerts_by_kind", r.alerts_by_kind},
          {"message_log_hash", r.message_log_hash},
          {"violations", r.violations}};
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  return to_hex(md, len);
}

RunReport report_from_log(const std::vector<std::string>& lines) {
  RunReport r;
  for (int k = 0; k <= static_cast<int>(care::AlertKind::MedReminder); ++k) {
    r.alerts_by_kind[std::string(care::to_string(static_cast<care::AlertKind>(k)))] = 0;
  }

  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("SHA-256 init failed");
  }

  std::uint64_t expected_seq = 0;
  std::optional<std::uint64_t> last_tick;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string& line = lines[n];
    EVP_DigestUpdate(ctx, line.data(), line.size());
    const std::string where = "log line " + std::to_string(n + 1);
    auto decoded = protocol::decode_message(line);
    if (const auto* err = std::get_if<protocol::DecodeError>(&decoded)) {
      r.violations.push_back(where + ": " + std::string(protocol::to_string(err->code)) + " " + err->field);
      continue;
    }
    const auto& m = std::get<protocol::Message>(decoded);
    if (!m.seq || *m.seq != expected_seq) {
      r.violations.push_back(where + ": seq " + (m.seq ? std::to_string(*m.seq) : "missing") + ", expected " +
                             std::to_string(expected_seq));
    }
    expected_seq = m.seq.value_or(expected_seq) + 1;

    if (const auto* t = std::get_if<protocol::Telemetry>(&m.payload)) {
      if (last_tick && t->tick < *last_tick) r.violations.push_back(where + ": tick went backwards");
      last_tick = t->tick;
      r.ticks = t->tick;
      r.coverage_fraction = t->visits.free == 0 ? 0.0 : static_cast<double>(t->visits.covered) / t->visits.free;
      r.max_visit_count = t->visits.max;
      if (t->collided) {
        ++r.collisions;
        if (t->mode == protocol::Mode::Autonomous) {
          r.violations.push_back("collision at tick " + std::to_string(t->tick) + " under autonomous control");
        }
      }
    } else if (const auto* a = std::get_if<protocol::AlertMsg>(&m.payload)) {
      ++r.alerts_by_kind[std::string(care::to_string(a->kind))];
    }
  }

  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  r.message_log_hash = to_hex(md, len);
  return r;
}

}  // namespace companion::supervisor
