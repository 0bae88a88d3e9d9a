#pragma once

#include <stdexcept>
#include <string>

namespace uniq {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define UNIQ_DEFINE_ERROR(NAME)                                       \
    struct NAME : Error {                                             \
        explicit NAME(const std::string& msg) : Error(msg) {}         \
    }

// dataset
UNIQ_DEFINE_ERROR(ParseError);
UNIQ_DEFINE_ERROR(DuplicatePath);
UNIQ_DEFINE_ERROR(MissingField);
UNIQ_DEFINE_ERROR(EmptyImpostorSet);

// degrade
UNIQ_DEFINE_ERROR(KernelTooWide);
UNIQ_DEFINE_ERROR(BadLength);
UNIQ_DEFINE_ERROR(BadVariance);

// matcher
UNIQ_DEFINE_ERROR(DegenerateEyes);
UNIQ_DEFINE_ERROR(TooFewFaces);
UNIQ_DEFINE_ERROR(ZeroProjection);
UNIQ_DEFINE_ERROR(NonFiniteScore);
UNIQ_DEFINE_ERROR(ShapeMismatch);

// stats
UNIQ_DEFINE_ERROR(TooFewValues);
UNIQ_DEFINE_ERROR(NonFiniteInput);
UNIQ_DEFINE_ERROR(LengthMismatch);
UNIQ_DEFINE_ERROR(ZeroVariance);
UNIQ_DEFINE_ERROR(MissingBaseline);
UNIQ_DEFINE_ERROR(ZeroBaseline);

// uniqueness
UNIQ_DEFINE_ERROR(DegenerateScores);

// pipeline
UNIQ_DEFINE_ERROR(ConfigError);
UNIQ_DEFINE_ERROR(SubjectNotInBothSessions);
UNIQ_DEFINE_ERROR(MissingPoseImages);
UNIQ_DEFINE_ERROR(IOError);

#undef UNIQ_DEFINE_ERROR

}  // namespace uniq
