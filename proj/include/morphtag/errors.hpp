#pragma once

#include <stdexcept>
#include <string>

namespace morphtag {

// Base of every error raised by the library. Each failure mode named in the
// module contracts gets its own subclass so callers (and tests) can catch it
// precisely.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MORPHTAG_DEFINE_ERROR(Name)        \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

// tagset
MORPHTAG_DEFINE_ERROR(EmptyTag);
MORPHTAG_DEFINE_ERROR(TagTooLong);
MORPHTAG_DEFINE_ERROR(EmptyTagsetError);
MORPHTAG_DEFINE_ERROR(UnknownTag);

// text / files
MORPHTAG_DEFINE_ERROR(InvalidUtf8);
MORPHTAG_DEFINE_ERROR(FileError);

// corpus
MORPHTAG_DEFINE_ERROR(MalformedLine);
MORPHTAG_DEFINE_ERROR(EmptyCorpus);
MORPHTAG_DEFINE_ERROR(BadFoldId);
MORPHTAG_DEFINE_ERROR(MalformedFoldFile);
MORPHTAG_DEFINE_ERROR(InventoryMismatch);

// lexicon
MORPHTAG_DEFINE_ERROR(UnknownLabel);
MORPHTAG_DEFINE_ERROR(MalformedLexiconLine);

// neural
MORPHTAG_DEFINE_ERROR(DimensionMismatch);
MORPHTAG_DEFINE_ERROR(NonFiniteValue);
MORPHTAG_DEFINE_ERROR(NonFiniteGradient);
MORPHTAG_DEFINE_ERROR(EmptySequence);
MORPHTAG_DEFINE_ERROR(BadClassIndex);

// tagger
MORPHTAG_DEFINE_ERROR(ConfigError);
MORPHTAG_DEFINE_ERROR(MissingCoarseHint);
MORPHTAG_DEFINE_ERROR(UnexpectedCoarseHint);
MORPHTAG_DEFINE_ERROR(MissingLexicon);
MORPHTAG_DEFINE_ERROR(EmptySentence);
MORPHTAG_DEFINE_ERROR(NonFiniteLoss);

// model files
MORPHTAG_DEFINE_ERROR(ModelFormatError);
MORPHTAG_DEFINE_ERROR(VersionMismatch);

// eval
MORPHTAG_DEFINE_ERROR(AlignmentError);
MORPHTAG_DEFINE_ERROR(DegenerateBaseline);

#undef MORPHTAG_DEFINE_ERROR

}  // namespace morphtag
