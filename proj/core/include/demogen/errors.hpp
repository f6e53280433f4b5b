#pragma once

#include <stdexcept>
#include <string>

namespace demogen {

// Base for all toolkit errors so callers can catch the whole family at once.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyCloudError : Error {
  using Error::Error;
};
struct MissingDeltaError : Error {
  using Error::Error;
};
struct NoSuchObjectError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};
struct FormatError : Error {
  using Error::Error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct NoContactDetectedError : Error {
  using Error::Error;
};
struct NonSequentialContactError : Error {
  using Error::Error;
};
// Raised when free-space frames trail the final skill segment; a parseable
// demonstration has to end in (or exactly at) its last skill.
struct TrailingMotionError : Error {
  using Error::Error;
};
struct PlanningFailedError : Error {
  using Error::Error;
};
struct StartOrGoalInCollisionError : Error {
  using Error::Error;
};
struct UnreachableTargetError : Error {
  using Error::Error;
};
struct DegenerateSplitError : Error {
  using Error::Error;
};
struct EmptyWorkspaceError : Error {
  using Error::Error;
};
struct ObstacleBlocksSkillError : Error {
  using Error::Error;
};
struct EmptyDatasetError : Error {
  using Error::Error;
};

}  // namespace demogen
