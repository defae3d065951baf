#pragma once

#include <cassert>
#include <string>
#include <utility>
#include <variant>

namespace atomcot {

/// Minimal expected-like result carrier (std::expected is not available yet).
template <typename T, typename E>
class Expected {
 public:
  Expected(T value) : v_(std::move(value)) {}
  Expected(E error) : v_(std::move(error)) {}

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  T& value() {
    assert(ok());
    return std::get<T>(v_);
  }
  const T& value() const {
    assert(ok());
    return std::get<T>(v_);
  }
  const E& error() const {
    assert(!ok());
    return std::get<E>(v_);
  }

 private:
  std::variant<T, E> v_;
};

enum class BackendErrorKind { Transport, Refusal, EmptyCompletion, MalformedScore };

struct BackendError {
  BackendErrorKind kind = BackendErrorKind::Transport;
  std::string message;
};

const char* to_string(BackendErrorKind k);

enum class EngineErrorKind {
  BadInput,
  BackendFailure,
  RetriesExhausted,
  EmptyScores,
  NoConcludedChains,
  AllRolloutsAborted,
  DeadEnd,
  MissingGold,
  NotConcluded,
  UnparsableAction,
  SegmentationFailure,
  TreeTooLarge,
};

struct EngineError {
  EngineErrorKind kind = EngineErrorKind::BadInput;
  std::string message;
};

const char* to_string(EngineErrorKind k);

template <typename T>
using BackendResult = Expected<T, BackendError>;

template <typename T>
using EngineResult = Expected<T, EngineError>;

}  // namespace atomcot
