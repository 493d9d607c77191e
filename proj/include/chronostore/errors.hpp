#pragma once

#include <stdexcept>
#include <string>

namespace chronostore {

// Root of the engine's error hierarchy. Every throw carries a message;
// the concrete type is part of the API contract.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// temporal core
struct OverlapError : Error { using Error::Error; };
struct NotAliveAtError : Error { using Error::Error; };
struct OverflowError : Error { using Error::Error; };

// document store
struct DuplicateCollectionError : Error { using Error::Error; };
struct UnknownCollectionError : Error { using Error::Error; };
struct UnknownIndexError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct ConflictError : Error { using Error::Error; };
struct PredicateTypeError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct CorruptCheckpointError : Error { using Error::Error; };

// graph layouts
struct LayoutMismatchError : Error { using Error::Error; };
struct CorruptLayoutError : Error { using Error::Error; };
struct InvariantViolationError : Error { using Error::Error; };

// mutation api
struct AlreadyAliveError : Error { using Error::Error; };
struct EndpointNotAliveError : Error { using Error::Error; };
struct EdgeAlreadyAliveError : Error { using Error::Error; };
struct OwnerNotAliveError : Error { using Error::Error; };
struct PropertyAlreadyAliveError : Error { using Error::Error; };
struct OutOfOrderError : Error { using Error::Error; };

// ingest
struct ParseError : Error { using Error::Error; };
struct UnknownKindError : Error { using Error::Error; };

// bench
struct MismatchError : Error { using Error::Error; };

}  // namespace chronostore
