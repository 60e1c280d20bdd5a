#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace osc {

using State = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigurationError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class CatalogError : public Error {
 public:
  using Error::Error;
};

class AlignmentFailure : public Error {
 public:
  using Error::Error;
};

// Non-finite state met during integration.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

class StiffnessError : public Error {
 public:
  StiffnessError(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

inline bool all_finite(const State& u) { return u.allFinite(); }

inline State make_state(std::initializer_list<double> xs) {
  State u(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) u[i++] = x;
  return u;
}

}  // namespace osc
