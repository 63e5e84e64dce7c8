#pragma once

#include <stdexcept>
#include <string>

namespace nnefx {

enum class ErrorKind {
  LexError,
  ParseError,
  ArityError,
  ValidationError,
  MissingWeight,
  MissingInput,
  ShapeMismatch,
  RankError,
  ChannelMismatch,
  AxisOutOfRange,
  ElementCountMismatch,
  WindowTooLarge,
  UnsupportedDilation,
  UnsupportedGroups,
  UnsupportedBorder,
  NotFireable,
  CapExceeded,
  UnknownTransition,
  UnknownSourceItem,
  UnresolvedVarsync,
  DuplicateWriter,
  InvalidAssignment,
  EmptyItem,
  ConflictingDeclarations,
  UnresolvedSync,
  DeadlockDetected,
  DuplicateWrite,
  ShapeUnsupported,
  MalformedEvent,
  IoError,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::LexError: return "LexError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ArityError: return "ArityError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::MissingWeight: return "MissingWeight";
    case ErrorKind::MissingInput: return "MissingInput";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::RankError: return "RankError";
    case ErrorKind::ChannelMismatch: return "ChannelMismatch";
    case ErrorKind::AxisOutOfRange: return "AxisOutOfRange";
    case ErrorKind::ElementCountMismatch: return "ElementCountMismatch";
    case ErrorKind::WindowTooLarge: return "WindowTooLarge";
    case ErrorKind::UnsupportedDilation: return "UnsupportedDilation";
    case ErrorKind::UnsupportedGroups: return "UnsupportedGroups";
    case ErrorKind::UnsupportedBorder: return "UnsupportedBorder";
    case ErrorKind::NotFireable: return "NotFireable";
    case ErrorKind::CapExceeded: return "CapExceeded";
    case ErrorKind::UnknownTransition: return "UnknownTransition";
    case ErrorKind::UnknownSourceItem: return "UnknownSourceItem";
    case ErrorKind::UnresolvedVarsync: return "UnresolvedVarsync";
    case ErrorKind::DuplicateWriter: return "DuplicateWriter";
    case ErrorKind::InvalidAssignment: return "InvalidAssignment";
    case ErrorKind::EmptyItem: return "EmptyItem";
    case ErrorKind::ConflictingDeclarations: return "ConflictingDeclarations";
    case ErrorKind::UnresolvedSync: return "UnresolvedSync";
    case ErrorKind::DeadlockDetected: return "DeadlockDetected";
    case ErrorKind::DuplicateWrite: return "DuplicateWrite";
    case ErrorKind::ShapeUnsupported: return "ShapeUnsupported";
    case ErrorKind::MalformedEvent: return "MalformedEvent";
    case ErrorKind::IoError: return "IoError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        detail_(message) {}

  ErrorKind kind() const { return kind_; }
  // Message without the kind prefix, for rethrowing with added context.
  const std::string& detail() const { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

// Lex and parse errors carry a source position (1-based).
class SyntaxError : public Error {
 public:
  SyntaxError(ErrorKind kind, const std::string& message, int line, int column)
      : Error(kind, message + " at line " + std::to_string(line) + ", column " +
                        std::to_string(column)),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace nnefx
