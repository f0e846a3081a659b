#include "multivaw/multivaw.hpp"

#include <array>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

namespace multivaw {

namespace {

constexpr std::array<char, 8> kMagic{'M', 'V', 'A', 'W', 'C', 'K', 'P', '1'};

template <typename T>
void write_raw(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw DataError("checkpoint: truncated stream");
  return value;
}

}  // namespace

MultiVaw::MultiVaw(RegularizationSchedule schedule, SolvePath path) : schedule_(std::move(schedule)) {
  const Index d = schedule_.dim();
  state_.lambda_prev = schedule_.first();
  state_.a = state_.lambda_prev;
  state_.b = Vector::Zero(d);
  theta_ = Vector::Zero(d);
  woodbury_ = path == SolvePath::woodbury || (path == SolvePath::automatic && schedule_.is_constant());
  if (woodbury_) state_.a_inv = spd_inverse(state_.a);
}

Vector MultiVaw::predict(const Matrix& features) { return predict(features, schedule_.at(state_.t + 1)); }

Vector MultiVaw::predict(const Matrix& features, const Matrix& next_lambda) {
  if (guard_.pending()) throw ProtocolViolation("multivaw: features received twice without a response");
  if (next_lambda.rows() != dim() || next_lambda.cols() != dim()) {
    throw DimensionMismatch("multivaw: regularization matrix has shape " + std::to_string(next_lambda.rows()) +
                            "x" + std::to_string(next_lambda.cols()) + ", expected " + std::to_string(dim()));
  }
  const bool lambda_moved = next_lambda != state_.lambda_prev;
  if (lambda_moved && !loewner_nondecreasing(state_.lambda_prev, next_lambda)) {
    throw ScheduleViolation("multivaw: regularization at step " + std::to_string(state_.t + 1) +
                            " does not dominate the previous one");
  }
  guard_.begin(features, dim(), name());

  if (lambda_moved) state_.a += next_lambda - state_.lambda_prev;
  add_gram(state_.a, features);

  if (woodbury_) {
    if (lambda_moved || ++updates_since_refresh_ >= kRefreshInterval) {
      state_.a_inv = spd_inverse(state_.a);
      updates_since_refresh_ = 0;
    } else {
      woodbury_update_in_place(*state_.a_inv, features);
    }
    theta_ = *state_.a_inv * state_.b;
  } else {
    theta_ = spd_solve(state_.a, state_.b);
  }
  if (lambda_moved) state_.lambda_prev = next_lambda;
  pending_features_ = features;
  return features * theta_;
}

void MultiVaw::observe(const Vector& response) {
  guard_.end(response, name());
  state_.b.noalias() += pending_features_.transpose() * response;
  ++state_.t;
}

void MultiVaw::save_checkpoint(std::ostream& out) const {
  if (guard_.pending()) throw ProtocolViolation("multivaw: cannot checkpoint between features and response");
  out.write(kMagic.data(), kMagic.size());
  const auto d = static_cast<std::uint64_t>(dim());
  write_raw(out, d);
  for (Index i = 0; i < dim(); ++i) {
    for (Index j = 0; j < dim(); ++j) write_raw(out, state_.a(i, j));
  }
  for (Index i = 0; i < dim(); ++i) write_raw(out, state_.b[i]);
  write_raw(out, state_.t);
  if (!out) throw DataError("checkpoint: write failed");
}

MultiVaw MultiVaw::load_checkpoint(std::istream& in, RegularizationSchedule schedule, SolvePath path) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw DataError("checkpoint: bad magic");
  const auto d = read_raw<std::uint64_t>(in);
  if (d != static_cast<std::uint64_t>(schedule.dim())) {
    throw DimensionMismatch("checkpoint: dimension " + std::to_string(d) + " does not match schedule dimension " +
                            std::to_string(schedule.dim()));
  }
  MultiVaw learner(std::move(schedule), path);
  const auto n = static_cast<Index>(d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) learner.state_.a(i, j) = read_raw<double>(in);
  }
  for (Index i = 0; i < n; ++i) learner.state_.b[i] = read_raw<double>(in);
  learner.state_.t = read_raw<std::uint64_t>(in);
  learner.state_.lambda_prev = learner.schedule_.at(learner.state_.t);
  if (learner.woodbury_) learner.state_.a_inv = spd_inverse(learner.state_.a);
  return learner;
}

}  // namespace multivaw
