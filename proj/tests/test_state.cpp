#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "boxkf/state.hpp"

using namespace boxkf;

namespace {

void expect_vector(const Vector & v, std::initializer_list<double> expected)
{
  ASSERT_EQ(v.size(), static_cast<Eigen::Index>(expected.size()));
  Eigen::Index i = 0;
  for (double e : expected) {
    EXPECT_DOUBLE_EQ(v(i), e) << "component " << i;
    ++i;
  }
}

Vector state_of(std::initializer_list<double> values)
{
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

}  // namespace

TEST(Parameterization, Dimensions)
{
  EXPECT_EQ(state_dim(Parameterization::CXCYWH), 6);
  EXPECT_EQ(state_dim(Parameterization::CXCYWH_V), 8);
  EXPECT_EQ(state_dim(Parameterization::CXCYSR), 7);
  EXPECT_EQ(state_dim(Parameterization::CXCYHA), 8);
  EXPECT_EQ(state_dim(Parameterization::RandomWalk), 4);
  for (auto p : kAllParameterizations) {
    EXPECT_EQ(meas_dim(p), 4);
    EXPECT_EQ(parse_parameterization(to_string(p)), p);
  }
  EXPECT_FALSE(parse_parameterization("xyah").has_value());
}

TEST(ToMeasurement, Layouts)
{
  const BoundingBox box{10, 20, 4, 2};
  expect_vector(to_measurement(box, Parameterization::CXCYWH), {10, 20, 4, 2});
  expect_vector(to_measurement(box, Parameterization::CXCYSR), {10, 20, 8, 2});
  expect_vector(to_measurement(box, Parameterization::CXCYHA), {10, 20, 2, 2});
  expect_vector(to_measurement(box, Parameterization::RandomWalk), {10, 20, 4, 2});
}

TEST(FromState, Layouts)
{
  EXPECT_EQ(from_state(state_of({10, 20, 0, 0, 4, 2}), Parameterization::CXCYWH), (BoundingBox{10, 20, 4, 2}));
  EXPECT_EQ(from_state(state_of({10, 20, 8, 2, 0, 0, 0}), Parameterization::CXCYSR), (BoundingBox{10, 20, 4, 2}));
  EXPECT_EQ(from_state(state_of({10, 20, 2, 2, 0, 0, 0, 0}), Parameterization::CXCYHA), (BoundingBox{10, 20, 4, 2}));
  EXPECT_EQ(
    from_state(state_of({10, 20, 1, 1, 4, 9, 2, 9}), Parameterization::CXCYWH_V), (BoundingBox{10, 20, 4, 2}));
}

TEST(FromState, NonPositiveSize)
{
  const auto kind_of = [](const Vector & x, Parameterization p) {
    try {
      from_state(x, p);
    } catch (const Error & e) {
      return e.kind();
    }
    return ErrorKind::IoError;
  };
  EXPECT_EQ(kind_of(state_of({0, 0, 0, 0, -1, 2}), Parameterization::CXCYWH), ErrorKind::NonPositiveSize);
  EXPECT_EQ(kind_of(state_of({0, 0, 0, 0, 1, 0}), Parameterization::CXCYWH), ErrorKind::NonPositiveSize);
  EXPECT_EQ(kind_of(state_of({0, 0, -8, 2, 0, 0, 0}), Parameterization::CXCYSR), ErrorKind::NonPositiveSize);
  EXPECT_EQ(kind_of(state_of({0, 0, 8, 0, 0, 0, 0}), Parameterization::CXCYSR), ErrorKind::NonPositiveSize);
  EXPECT_EQ(kind_of(state_of({0, 0, 2, -2, 0, 0, 0, 0}), Parameterization::CXCYHA), ErrorKind::NonPositiveSize);
  EXPECT_EQ(kind_of(state_of({0, 0, 1, 1}), Parameterization::CXCYWH), ErrorKind::DimensionMismatch);
}

TEST(FromState, RoundTripProperty)
{
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> pos(-2000.0, 2000.0);
  std::uniform_real_distribution<double> log_size(std::log(0.5), std::log(2000.0));
  for (int trial = 0; trial < 1000; ++trial) {
    const BoundingBox b{pos(gen), pos(gen), std::exp(log_size(gen)), std::exp(log_size(gen))};
    for (auto p : kAllParameterizations) {
      const BoundingBox r = from_state(embed(to_measurement(b, p), p), p);
      EXPECT_NEAR(r.cx, b.cx, 1e-9 * std::abs(b.cx));
      EXPECT_NEAR(r.cy, b.cy, 1e-9 * std::abs(b.cy));
      EXPECT_NEAR(r.w, b.w, 1e-9 * b.w);
      EXPECT_NEAR(r.h, b.h, 1e-9 * b.h);
    }
  }
}

TEST(GaussianState, RejectsAsymmetricAndNonFinite)
{
  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 0.5;
  EXPECT_THROW(GaussianState(Vector::Zero(2), asym), Error);

  Matrix nan_cov = Matrix::Identity(2, 2);
  nan_cov(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(GaussianState(Vector::Zero(2), nan_cov), Error);

  Vector inf_mean = Vector::Zero(2);
  inf_mean(0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(GaussianState(inf_mean, Matrix::Identity(2, 2)), Error);

  EXPECT_THROW(GaussianState(Vector::Zero(3), Matrix::Identity(2, 2)), Error);

  Matrix indefinite(2, 2);
  indefinite << 1, 2, 2, 1;
  EXPECT_THROW(GaussianState(Vector::Zero(2), indefinite), Error);
}

TEST(GaussianState, SymmetrizesOnStore)
{
  std::mt19937_64 gen(7);
  std::normal_distribution<double> nd;
  Matrix A(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) A(i, j) = nd(gen);
  const Matrix sym = A * A.transpose();
  const GaussianState s(Vector::Zero(5), sym);
  EXPECT_LE((s.cov() - sym).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(s.cov(), s.cov().transpose());

  Matrix nudged = sym;
  nudged(0, 1) += 1e-13;
  const GaussianState t(Vector::Zero(5), nudged);
  EXPECT_EQ(t.cov(), t.cov().transpose());
}

TEST(NoiseParams, Validation)
{
  EXPECT_NO_THROW(NoiseParams{}.validate());
  NoiseParams bad_dt = NoiseParams::uniform(0.0, 1.0, 1.0);
  try {
    bad_dt.validate();
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidDt);
  }
  NoiseParams neg = NoiseParams::uniform(1.0, 1.0, 1.0);
  neg.sigma_meas[2] = -0.1;
  EXPECT_THROW(neg.validate(), Error);
}

TEST(BoundingBox, CornerConversion)
{
  const BoundingBox b = BoundingBox::from_corner(10, 20, 4, 2);
  EXPECT_EQ(b, (BoundingBox{12, 21, 4, 2}));
  EXPECT_DOUBLE_EQ(b.left(), 10);
  EXPECT_DOUBLE_EQ(b.top(), 20);
  EXPECT_TRUE(is_valid(b));
  EXPECT_FALSE(is_valid(BoundingBox{0, 0, 0, 1}));
}
