#pragma once

#include <stdexcept>
#include <string>

namespace pkgrec {

/// Base of every error the library throws. `kind()` is the stable name
/// surfaced by the CLI and the service (e.g. "NoKnownImportsError").
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define PKGREC_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  }

PKGREC_DEFINE_ERROR(IoError);
PKGREC_DEFINE_ERROR(FormatError);
PKGREC_DEFINE_ERROR(NotebookFormatError);
PKGREC_DEFINE_ERROR(InvalidArgumentError);
PKGREC_DEFINE_ERROR(EmptyVocabularyError);
PKGREC_DEFINE_ERROR(DegenerateSamplerError);
PKGREC_DEFINE_ERROR(DimensionError);
PKGREC_DEFINE_ERROR(ZeroVectorError);
PKGREC_DEFINE_ERROR(NoKnownNeighborsError);
PKGREC_DEFINE_ERROR(NoKnownImportsError);
PKGREC_DEFINE_ERROR(EmptyIndexError);
PKGREC_DEFINE_ERROR(SummarizerUnavailableError);
PKGREC_DEFINE_ERROR(NoEvaluableFilesError);
PKGREC_DEFINE_ERROR(LabelResolutionError);

#undef PKGREC_DEFINE_ERROR

/// Raised when an SGD update produces a non-finite value.
class TrainingDivergedError : public Error {
 public:
  TrainingDivergedError(int epoch, int target, int context)
      : Error("TrainingDivergedError",
              "non-finite update at epoch " + std::to_string(epoch) + ", pair (" +
                  std::to_string(target) + ", " + std::to_string(context) + ")"),
        epoch_(epoch),
        target_(target),
        context_(context) {}

  int epoch() const noexcept { return epoch_; }
  int target() const noexcept { return target_; }
  int context() const noexcept { return context_; }

 private:
  int epoch_;
  int target_;
  int context_;
};

}  // namespace pkgrec
