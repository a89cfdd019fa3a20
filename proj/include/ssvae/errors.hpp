#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ssvae {

// shape disagreement between tensors or against an op contract
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// value outside an op's mathematical domain (log of non-positive, ...)
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// op requested on a model variant that lacks the required head
struct VariantError : std::logic_error {
    using std::logic_error::logic_error;
};

// malformed input file; carries the byte offset of the problem
struct FormatError : std::runtime_error {
    FormatError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
          offset(offset) {}
    std::size_t offset;
};

struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DataError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// training aborted on a non-finite loss; names the offending part
struct NanAbortError : std::runtime_error {
    NanAbortError(const std::string& part, std::size_t epoch)
        : std::runtime_error("non-finite " + part + " loss in epoch " + std::to_string(epoch)),
          part(part),
          epoch(epoch) {}
    std::string part;
    std::size_t epoch;
};

}  // namespace ssvae
