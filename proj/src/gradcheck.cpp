#include "tsad/gradcheck.hpp"

namespace tsad {

namespace {

double eval_loss(const TapeLossFn& loss_fn, const std::vector<Mat>& params) {
  Tape tape;
  std::vector<Var> vars;
  vars.reserve(params.size());
  for (const Mat& p : params) vars.push_back(tape.leaf(p));
  Var loss = loss_fn(tape, vars);
  const Mat& v = tape.value(loss);
  if (v.rows() != 1 || v.cols() != 1) {
    throw ShapeError(cat("finite_diff_check: loss must be scalar, got ", shape_str(v)));
  }
  return v(0, 0);
}

}  // namespace

double finite_diff_check(const TapeLossFn& loss_fn, const std::vector<Mat>& params,
                         double epsilon) {
  if (!(epsilon > 0.0)) throw Error(cat("finite_diff_check: epsilon must be positive, got ", epsilon));

  // Analytic pass.
  Tape tape;
  std::vector<Var> vars;
  vars.reserve(params.size());
  for (const Mat& p : params) vars.push_back(tape.leaf(p));
  Var loss = loss_fn(tape, vars);
  const Mat& lv = tape.value(loss);
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw ShapeError(cat("finite_diff_check: loss must be scalar, got ", shape_str(lv)));
  }
  if (!std::isfinite(lv(0, 0))) throw NumericError("finite_diff_check: loss is non-finite");
  Tape::Gradients grads = tape.backward(loss);

  double worst = 0.0;
  std::vector<Mat> perturbed = params;
  for (size_t pi = 0; pi < params.size(); ++pi) {
    const Mat& analytic = grads.at(vars[pi]);
    for (Eigen::Index r = 0; r < params[pi].rows(); ++r) {
      for (Eigen::Index c = 0; c < params[pi].cols(); ++c) {
        const double orig = perturbed[pi](r, c);
        perturbed[pi](r, c) = orig + epsilon;
        const double up = eval_loss(loss_fn, perturbed);
        perturbed[pi](r, c) = orig - epsilon;
        const double down = eval_loss(loss_fn, perturbed);
        perturbed[pi](r, c) = orig;
        if (!std::isfinite(up) || !std::isfinite(down)) {
          throw NumericError("finite_diff_check: perturbed loss is non-finite");
        }
        const double numeric = (up - down) / (2.0 * epsilon);
        const double a = analytic(r, c);
        const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
        worst = std::max(worst, std::abs(a - numeric) / denom);
      }
    }
  }
  return worst;
}

}  // namespace tsad
