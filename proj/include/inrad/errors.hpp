#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace inrad {

// Broad classes used by the CLI to pick an exit code.
enum class ErrorClass { kInput, kNumeric, kContract };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), class_(cls) {}
  ErrorClass error_class() const noexcept { return class_; }

 private:
  ErrorClass class_;
};

#define INRAD_DEFINE_ERROR(Name, Cls)                                          \
  class Name : public Error {                                                  \
   public:                                                                     \
    explicit Name(const std::string& what) : Error(ErrorClass::Cls, what) {}   \
  };

INRAD_DEFINE_ERROR(ShapeError, kContract)
INRAD_DEFINE_ERROR(ContractError, kContract)
INRAD_DEFINE_ERROR(NumericError, kNumeric)
INRAD_DEFINE_ERROR(RangeError, kInput)
INRAD_DEFINE_ERROR(ParseError, kInput)
INRAD_DEFINE_ERROR(EmptyInputError, kInput)
INRAD_DEFINE_ERROR(FormatError, kInput)
INRAD_DEFINE_ERROR(SchemaError, kInput)
INRAD_DEFINE_ERROR(SpecError, kInput)
INRAD_DEFINE_ERROR(ConfigError, kInput)

#undef INRAD_DEFINE_ERROR

// Loss went non-finite during training. last_finite_epoch is 0 when the very
// first evaluation already failed.
class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, std::size_t last_finite_epoch)
      : Error(ErrorClass::kNumeric, what), last_finite_epoch_(last_finite_epoch) {}
  std::size_t last_finite_epoch() const noexcept { return last_finite_epoch_; }

 private:
  std::size_t last_finite_epoch_;
};

}  // namespace inrad
