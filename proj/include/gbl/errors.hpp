#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gbl {

enum class ErrorKind {
  RankDeficient,
  DimensionMismatch,
  OutOfChart,
  CutLocus,
  PreconditionViolated,
  InversionFailure,
  RootBracketFailure,
  UnknownName,
  OutOfDomain,
  FrameDegeneracy,
  Stalled,
  InvalidGraphSpec,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base of every error raised by the library. Catch this to handle any
/// library failure, or one of the kind-specific aliases below.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

template <ErrorKind K>
class KindedError : public Error {
 public:
  explicit KindedError(const std::string& what) : Error(K, what) {}
};

using RankDeficient = KindedError<ErrorKind::RankDeficient>;
using DimensionMismatch = KindedError<ErrorKind::DimensionMismatch>;
using OutOfChart = KindedError<ErrorKind::OutOfChart>;
using CutLocus = KindedError<ErrorKind::CutLocus>;
using PreconditionViolated = KindedError<ErrorKind::PreconditionViolated>;
using InversionFailure = KindedError<ErrorKind::InversionFailure>;
using RootBracketFailure = KindedError<ErrorKind::RootBracketFailure>;
using UnknownName = KindedError<ErrorKind::UnknownName>;
using OutOfDomain = KindedError<ErrorKind::OutOfDomain>;
using FrameDegeneracy = KindedError<ErrorKind::FrameDegeneracy>;
using Stalled = KindedError<ErrorKind::Stalled>;
using InvalidGraphSpec = KindedError<ErrorKind::InvalidGraphSpec>;

}  // namespace gbl
