#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "companion/protocol/messages.hpp"

namespace companion::protocol {

inline constexpr std::size_t kMaxLineBytes = 1u << 20;
inline constexpr int kMaxNesting = 32;

class EncodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One line: keys sorted, floats as %.9g, -0 written as 0, trailing "\n".
/// Throws EncodeError for non-finite numbers, invalid UTF-8, or an envelope
/// without exactly one of id and seq.
std::string encode_message(const Message& m);

/// Canonical text of an arbitrary JSON value, no trailing newline.
std::string canonical_json(const nlohmann::json& j);

/// The JSON object encode_message writes (before serialization).
nlohmann::json to_json(const Message& m);

enum class ErrorCode { ParseError, FrameTooLarge, UnknownType, MissingField, InvalidField };
std::string_view to_string(ErrorCode c);

struct DecodeError {
  ErrorCode code = ErrorCode::ParseError;
  std::string field;  // dotted path for field errors, e.g. "payload.mode"
  std::string detail;

  bool operator==(const DecodeError&) const = default;
};

using DecodeResult = std::variant<Message, DecodeError>;

/// Accepts one line with or without its "\n" (a trailing "\r" is tolerated).
/// Never throws; every failure comes back as a DecodeError.
DecodeResult decode_message(std::string_view line);

/// Decodes an already parsed value (same checks as decode_message after parsing).
DecodeResult decode_json(const nlohmann::json& j);

}  // namespace companion::protocol
