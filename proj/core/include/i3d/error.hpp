#pragma once

#include <stdexcept>
#include <string>

namespace i3d {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Image or tensor dimensions violate an operation's requirements.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A linear system is rank-deficient or a matrix is (near) singular.
class RankError : public Error {
 public:
  using Error::Error;
};

// Too few samples/correspondences to solve the problem at all.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// A scene, model, or run configuration is inconsistent.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A requested patch region is empty or falls outside the image.
class RegionError : public Error {
 public:
  using Error::Error;
};

// Feature/model shapes or layouts do not match.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Dataset is degenerate for the requested operation (single class, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

// Training diverged or could not proceed.
class TrainingError : public Error {
 public:
  using Error::Error;
};

// Geometric preconditions violated (non-positive depth, bad radius, ...).
class GeometryError : public Error {
 public:
  using Error::Error;
};

// File could not be read, written, or parsed.
class IoError : public Error {
 public:
  using Error::Error;
};

// An argument value is outside its documented range.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

}  // namespace i3d
