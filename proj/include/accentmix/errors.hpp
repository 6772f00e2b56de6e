#ifndef ACCENTMIX_ERRORS_HPP
#define ACCENTMIX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace accentmix {

// Base class for every operational error raised by the toolkit. The CLI maps
// any Error to exit code 1; usage mistakes are handled by the parser (exit 2).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// audio
class UnsupportedFormat : public Error { public: using Error::Error; };
class CorruptFile : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };
class InvalidFraming : public Error { public: using Error::Error; };

// lpc
class InvalidLag : public Error { public: using Error::Error; };
class DegenerateFrame : public Error { public: using Error::Error; };
class RootFindingDiverged : public Error { public: using Error::Error; };
class ConjugateMismatch : public Error { public: using Error::Error; };
class UnstableFilter : public Error { public: using Error::Error; };

// time-domain augmentation
class InvalidFactor : public Error { public: using Error::Error; };

// manifests / splitting
class ParseError : public Error { public: using Error::Error; };
class DuplicateId : public Error { public: using Error::Error; };
class InfeasibleSplit : public Error { public: using Error::Error; };

// mixing
class DuplicateCorpus : public Error { public: using Error::Error; };
class InsufficientData : public Error { public: using Error::Error; };

// metrics
class EmptyReference : public Error { public: using Error::Error; };

// ctc
class MalformedMatrix : public Error { public: using Error::Error; };

// reporting
class MissingTestset : public Error { public: using Error::Error; };

}  // namespace accentmix

#endif  // ACCENTMIX_ERRORS_HPP
