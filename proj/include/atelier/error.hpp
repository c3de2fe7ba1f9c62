#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace atelier {

enum class ErrorCode {
    missing_header,
    unexpected_header,
    not_utf8,
    malformed_csv,
    invalid_record,
    invalid_config,
    invalid_url,
    network_unreachable,
    adapter_invalid,
    adapter_selector_invalid,
    undecodable_image,
    unknown_member_id,
    duplicate_id,
    provider_unavailable,
    data_load_failure,
    port_in_use,
    io_error,
};

std::string_view to_string(ErrorCode code);

// All recoverable failures surface as this one exception type; callers
// branch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// A data-quality finding that does not abort processing. row is the
// 1-based CSV row (header = row 1), or 0 when not row-scoped.
struct Issue {
    std::size_t row = 0;
    std::string field;
    std::string message;

    std::string to_string() const;
    bool operator==(const Issue&) const = default;
};

}  // namespace atelier
