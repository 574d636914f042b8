#ifndef CGBENCH_ERROR_HPP
#define CGBENCH_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cgbench {

/// Error codes shared across the toolkit. Every thrown Error carries one of
/// these so callers (and the CLI) can react without string matching.
enum class Errc {
  malformed_document,    // input is not valid JSON at all
  schema_violation,      // JSON parsed but does not satisfy the graph schema
  parse_error,           // JavaScript source is syntactically invalid
  unsupported_construct, // valid JS, but outside the supported subset
  missing_locations,     // AST document lacks position info on a function/call
  dot_syntax,            // DOT input outside the accepted subset
  label_mismatch,        // DOT/edge-list node label does not match the pattern
  unknown_key,           // referenced node key not present in the graph
  key_collision,         // position repair would collide two distinct nodes
  duplicate_tool_id,     // same tool id given twice to merge
  unknown_edge,          // validity label for an edge the merged graph lacks
  unvalidated_edges,     // stats requested while some edges are unlabeled
  sample_too_large,      // sample size exceeds the population
  infeasible_params,     // generator parameters cannot be satisfied
  target_failed,         // benchmark target exited with nonzero status
  missing_source,        // validation cannot show context: source file absent
  io_error,              // file could not be read or written
  usage,                 // bad command-line invocation
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::malformed_document: return "MALFORMED_DOCUMENT";
    case Errc::schema_violation: return "SCHEMA_VIOLATION";
    case Errc::parse_error: return "PARSE_ERROR";
    case Errc::unsupported_construct: return "UNSUPPORTED_CONSTRUCT";
    case Errc::missing_locations: return "MISSING_LOCATIONS";
    case Errc::dot_syntax: return "DOT_SYNTAX";
    case Errc::label_mismatch: return "LABEL_MISMATCH";
    case Errc::unknown_key: return "UNKNOWN_KEY";
    case Errc::key_collision: return "KEY_COLLISION";
    case Errc::duplicate_tool_id: return "DUPLICATE_TOOL_ID";
    case Errc::unknown_edge: return "UNKNOWN_EDGE";
    case Errc::unvalidated_edges: return "UNVALIDATED_EDGES";
    case Errc::sample_too_large: return "SAMPLE_TOO_LARGE";
    case Errc::infeasible_params: return "INFEASIBLE_PARAMS";
    case Errc::target_failed: return "TARGET_FAILED";
    case Errc::missing_source: return "MISSING_SOURCE";
    case Errc::io_error: return "IO_ERROR";
    case Errc::usage: return "USAGE";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code), message_(std::move(message)) {}

  /// Convenience for errors anchored at a source position.
  Error(Errc code, const std::string& file, int line, int column,
        const std::string& message)
      : Error(code, file + ":" + std::to_string(line) + ":" +
                        std::to_string(column) + ": " + message) {}

  Errc code() const { return code_; }
  const std::string& message() const { return message_; }

 private:
  Errc code_;
  std::string message_;
};

}  // namespace cgbench

#endif  // CGBENCH_ERROR_HPP
