#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "marginpca/dataset.hpp"
#include "marginpca/matrix.hpp"

namespace marginpca {

enum class ClassifierKind { fld, logreg, svm, gnb };

const char* classifier_name(ClassifierKind k);
ClassifierKind classifier_from_name(const std::string& name);

struct GnbParams {
  Vector mean_neg, var_neg, mean_pos, var_pos;
  double prior_neg = 0.5, prior_pos = 0.5;
};

struct TrainedClassifier {
  ClassifierKind kind = ClassifierKind::fld;
  Vector w;
  double b = 0.0;
  std::optional<GnbParams> gnb;
  bool converged = true;  // solvers return their best iterate either way
};

/// Fisher discriminant: (S_w + εI) w = μ̂₊ − μ̂₋ with ε = 1e-6·tr(S_w)/K,
/// bias set so the midpoint of the projected class means scores zero.
TrainedClassifier train_fld(const Matrix& x, const std::vector<int>& y);

/// ℓ2-regularized logistic regression (bias unpenalized), Newton iterations
/// from zero to gradient ∞-norm ≤ 1e-6 (or 1000 iterations, flagged).
TrainedClassifier train_logreg(const Matrix& x, const std::vector<int>& y, double lambda);

/// ℓ2-regularized squared-hinge SVM with the bias folded in as a constant-1
/// feature; solved by the same Newton scheme to gradient ∞-norm ≤ 1e-5.
TrainedClassifier train_svm(const Matrix& x, const std::vector<int>& y, double c);

/// Gaussian naive Bayes with per-class feature means/variances (variance
/// floored at max(1e-12, 1e-9·mean feature variance)) and frequency priors.
TrainedClassifier train_gnb(const Matrix& x, const std::vector<int>& y);

/// sign(wᵀx + b) with 0 → +1 for the linear kinds; posterior argmax for gnb.
std::vector<int> predict(const TrainedClassifier& c, const Matrix& x);

/// Objectives and analytic gradients over θ = (w, b), exposed so tests can
/// check them against finite differences.
double logreg_objective(const Matrix& x, const std::vector<int>& y, const Vector& w, double b,
                        double lambda);
Vector logreg_gradient(const Matrix& x, const std::vector<int>& y, const Vector& w, double b,
                       double lambda);
double svm_objective(const Matrix& x, const std::vector<int>& y, const Vector& w, double b,
                     double c);
Vector svm_gradient(const Matrix& x, const std::vector<int>& y, const Vector& w, double b,
                    double c);

struct HyperParams {
  double value = 1.0;
  std::vector<double> grid;
  bool two_fold_fallback = false;
};

std::vector<double> default_grid();  // 10^-3 .. 10^3, 7 points

/// Stratified k-fold CV over the full dataset for svm (C) or logreg (λ);
/// ties go to the stronger regularization. Falls back from 5 to 2 folds
/// when a class is too small, flagged in the result.
HyperParams cv_select(const Dataset& ds, ClassifierKind kind, const std::vector<double>& grid,
                      std::uint64_t seed);

}  // namespace marginpca
