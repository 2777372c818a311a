#include "ksgm/sgm.hpp"

#include "ksgm/errors.hpp"
#include "ksgm/format.hpp"
#include "ksgm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace ksgm {

namespace {

void require_binary_labels(const dataset &data, const char *what) {
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double y = data[i].label;
        if (y != 1.0 && y != -1.0) {
            throw training_error{ std::string{ what } + " label " + format_real(y) + " at sample " +
                                  std::to_string(i + 1) + " is not +1 or -1" };
        }
    }
}

double mean_loss(loss_kind kind, const dataset &data, std::span<const double> margins) {
    compensated_sum total;
    for (std::size_t i = 0; i < data.size(); ++i) {
        total.add(detail::value_unchecked(kind, data[i].label, margins[i]));
    }
    return total.value() / static_cast<double>(data.size());
}

double error_rate(const dataset &data, std::span<const double> margins) {
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double label = margins[i] >= 0.0 ? 1.0 : -1.0;
        wrong += label != data[i].label ? 1 : 0;
    }
    return static_cast<double>(wrong) / static_cast<double>(data.size());
}

// Margins of an external point set against a fixed training support, with
// kernel columns cached per support point while memory allows.
class external_margins {
  public:
    external_margins(const kernel_evaluator &kernel, const dataset &points) :
        kernel_{ kernel }, points_{ points }, columns_(kernel.size()) {
        norms_.reserve(points.size());
        for (const sample &s : points) {
            norms_.push_back(squared_norm(s.features));
        }
        cache_columns_ = kernel.size() * points.size() <= (std::size_t{ 1 } << 25);
    }

    void compute(std::span<const double> coeffs, std::span<const std::size_t> support, std::vector<double> &out) {
        out.assign(points_.size(), 0.0);
        std::vector<double> scratch;
        for (const std::size_t s : support) {
            const double c = coeffs[s];
            if (c == 0.0) {
                continue;
            }
            const std::vector<double> &column = this->column(s, scratch);
            for (std::size_t v = 0; v < out.size(); ++v) {
                out[v] += c * column[v];
            }
        }
    }

  private:
    const std::vector<double> &column(std::size_t s, std::vector<double> &scratch) {
        std::vector<double> &target = cache_columns_ ? columns_[s] : scratch;
        if (cache_columns_ && !target.empty()) {
            return target;
        }
        target.resize(points_.size());
        for (std::size_t v = 0; v < points_.size(); ++v) {
            target[v] = kernel_(s, points_[v].features, norms_[v]);
        }
        return target;
    }

    const kernel_evaluator &kernel_;
    const dataset &points_;
    std::vector<double> norms_;
    std::vector<std::vector<double>> columns_;
    bool cache_columns_{ false };
};

class trainer {
  public:
    trainer(std::shared_ptr<const dataset> data, const kernel_spec &kernel, const loss_spec &loss,
            const sgm_run_config &config, const dataset *validation) :
        data_{ std::move(data) }, loss_{ loss }, config_{ config }, validation_{ validation } {
        if (!data_ || data_->empty()) {
            throw training_error{ "training set is empty" };
        }
        if (config_.total_iterations == 0) {
            throw invalid_argument{ "total iterations must be at least 1" };
        }
        config_.schedule.validate();
        require_binary_labels(*data_, "training");
        if (validation_ != nullptr) {
            if (validation_->empty()) {
                throw invalid_argument{ "validation set is empty" };
            }
            require_binary_labels(*validation_, "validation");
        }
        m_ = data_->size();
        cadence_ = config_.record_cadence == 0 ? m_ : config_.record_cadence;
        evaluator_ = std::make_shared<const kernel_evaluator>(kernel, data_);
        result_.kappa = ksgm::kappa(kernel, *data_);
        check_step_ceiling();

        const bool need_rows = config_.use_cache || config_.check_invariants;
        if (need_rows) {
            std::size_t capacity = config_.cache_capacity;
            if (config_.check_invariants) {
                capacity = m_;
            }
            cache_ = std::make_unique<gram_cache>(evaluator_, capacity);
        }
        coeffs_.assign(m_, 0.0);
        in_support_.assign(m_, 0);
        if (config_.compute_average) {
            partial_.assign(m_, 0.0);
            flushed_at_.assign(m_, 0.0);
        }
        if (validation_ != nullptr) {
            validation_margins_ = std::make_unique<external_margins>(*evaluator_, *validation_);
        }
        if (config_.check_invariants) {
            setup_probes();
        }
    }

    train_result run() {
        counter_rng sampler{ derive_seed(config_.seed, 0) };
        const loss_kind kind = loss_.kind;
        const double a0_kappa = loss_.a0 * result_.kappa;
        std::size_t t = 1;
        for (; t <= config_.total_iterations; ++t) {
            const auto j = static_cast<std::size_t>(sampler.uniform_below(m_));
            const double eta = step_size(config_.schedule, t);
            const double y = (*data_)[j].label;
            const double margin = margin_at(j);

            if (config_.check_invariants) {
                refresh_train_margins();
                weighted_risk_.add(eta * mean_loss(kind, *data_, train_margins_));
            }

            const double derivative = detail::left_derivative_unchecked(kind, y, margin);
            weight_sum_.add(eta);
            sum_squares_.add(eta * eta);
            const double a_t = weight_sum_.value();
            if (derivative != 0.0) {
                if (config_.compute_average) {
                    partial_[j] += coeffs_[j] * (a_t - flushed_at_[j]);
                    flushed_at_[j] = a_t;
                }
                std::vector<double> distances_before;
                if (config_.check_invariants) {
                    distances_before = probe_distances();
                }
                coeffs_[j] -= eta * derivative;
                if (!std::isfinite(coeffs_[j])) {
                    throw training_error{ "non-finite coefficient at sample " + std::to_string(j + 1), t };
                }
                if (in_support_[j] == 0 && coeffs_[j] != 0.0) {
                    in_support_[j] = 1;
                    support_.insert(std::upper_bound(support_.begin(), support_.end(), j), j);
                }
                if (config_.check_invariants) {
                    refresh_train_margins();
                    const std::vector<double> distances_after = probe_distances();
                    check_step(distances_before, distances_after, j, y, margin, eta, a0_kappa);
                }
            } else if (config_.check_invariants) {
                // w_{k+1} = w_k: the inequality reduces to the loss gap term.
                const std::vector<double> distances = probe_distances();
                check_step(distances, distances, j, y, margin, eta, a0_kappa);
            }

            if (t % cadence_ == 0 || t == config_.total_iterations) {
                if (!record(t, eta)) {
                    break;
                }
            }
        }
        result_.iterations = std::min(t, config_.total_iterations);
        finish();
        return std::move(result_);
    }

  private:
    void check_step_ceiling() {
        const auto ceiling = max_smooth_step(loss_, result_.kappa);
        if (!ceiling) {
            return;
        }
        const double eta1 = step_size(config_.schedule, 1);
        if (eta1 <= *ceiling) {
            return;
        }
        const std::string message = "step size " + format_real(eta1) + " exceeds the smooth-loss ceiling 2/(kappa^2 L) = " +
                                     format_real(*ceiling);
        if (!config_.allow_large_steps) {
            throw training_error{ message };
        }
        result_.warnings.push_back(message);
    }

    double margin_at(std::size_t j) {
        double total = 0.0;
        if (cache_ && 4 * support_.size() >= m_) {
            const gram_cache::row_ptr row = cache_->row(j);
            for (const std::size_t s : support_) {
                total += coeffs_[s] * (*row)[s];
            }
        } else {
            for (const std::size_t s : support_) {
                total += coeffs_[s] * (*evaluator_)(j, s);
            }
        }
        return total;
    }

    // Training margins F = K c, recomputed from Gram rows.
    void refresh_train_margins() { train_margins_for(coeffs_, train_margins_); }

    void train_margins_for(std::span<const double> coeffs, std::vector<double> &out) {
        out.assign(m_, 0.0);
        for (const std::size_t s : support_) {
            const double c = coeffs[s];
            if (c == 0.0) {
                continue;
            }
            if (cache_) {
                const gram_cache::row_ptr row = cache_->row(s);
                for (std::size_t i = 0; i < m_; ++i) {
                    out[i] += c * (*row)[i];
                }
            } else {
                for (std::size_t i = 0; i < m_; ++i) {
                    out[i] += c * (*evaluator_)(s, i);
                }
            }
        }
    }

    void setup_probes() {
        counter_rng rng{ derive_seed(config_.seed, 1) };
        const double scale = 1.0 / std::sqrt(static_cast<double>(m_));
        probes_.resize(config_.invariant_probes);
        probe_margins_.resize(config_.invariant_probes);
        for (std::size_t r = 0; r < probes_.size(); ++r) {
            probes_[r].resize(m_);
            for (double &p : probes_[r]) {
                p = rng.uniform(-scale, scale);
            }
            probe_margins_[r].assign(m_, 0.0);
            for (std::size_t s = 0; s < m_; ++s) {
                const gram_cache::row_ptr row = cache_->row(s);
                for (std::size_t i = 0; i < m_; ++i) {
                    probe_margins_[r][i] += probes_[r][s] * (*row)[i];
                }
            }
        }
        train_margins_.assign(m_, 0.0);
    }

    // ||w - p||^2 = (c - p)^T (K c - K p) for every probe, using train_margins_.
    std::vector<double> probe_distances() const {
        std::vector<double> out(probes_.size());
        for (std::size_t r = 0; r < probes_.size(); ++r) {
            double total = 0.0;
            for (std::size_t i = 0; i < m_; ++i) {
                total += (coeffs_[i] - probes_[r][i]) * (train_margins_[i] - probe_margins_[r][i]);
            }
            out[r] = std::max(0.0, total);
        }
        return out;
    }

    void check_step(const std::vector<double> &before, const std::vector<double> &after, std::size_t j, double y,
                    double margin, double eta, double a0_kappa) {
        const loss_kind kind = loss_.kind;
        const double own_loss = detail::value_unchecked(kind, y, margin);
        for (std::size_t r = 0; r < probes_.size(); ++r) {
            const double probe_loss = detail::value_unchecked(kind, y, probe_margins_[r][j]);
            const double ceiling = before[r] + a0_kappa * a0_kappa * eta * eta + 2.0 * eta * (probe_loss - own_loss);
            result_.invariants.step_inequality.record(after[r] - ceiling, 1e-9);
        }
    }

    std::vector<double> averaged_coefficients() const {
        std::vector<double> avg(m_, 0.0);
        const double a_t = weight_sum_.value();
        for (const std::size_t s : support_) {
            avg[s] = (partial_[s] + coeffs_[s] * (a_t - flushed_at_[s])) / a_t;
        }
        return avg;
    }

    double squared_norm_of(std::span<const double> coeffs) {
        std::vector<double> margins;
        train_margins_for(coeffs, margins);
        double total = 0.0;
        for (const std::size_t s : support_) {
            total += coeffs[s] * margins[s];
        }
        return total;
    }

    bool record(std::size_t t, double eta) {
        trace_record rec;
        rec.t = t;
        rec.pass = (t + m_ - 1) / m_;
        rec.eta = eta;
        const step_sums sums{ weight_sum_.value(), sum_squares_.value() };
        rec.norm_bound = iterate_norm_ceiling(loss_.a0, result_.kappa, loss_.v0, sums);
        rec.norm = std::sqrt(std::max(0.0, squared_norm_of(coeffs_)));
        result_.invariants.norm_ceiling.record(rec.norm - rec.norm_bound, 1e-9);

        std::vector<double> averaged;
        if (config_.compute_average) {
            averaged = averaged_coefficients();
        }
        const loss_kind kind = loss_.kind;
        if (config_.record_train_risk || config_.check_invariants) {
            std::vector<double> margins;
            train_margins_for(coeffs_, margins);
            rec.emp_risk_last = mean_loss(kind, *data_, margins);
            if (validation_ == nullptr) {
                rec.err_last = error_rate(*data_, margins);
            }
            if (config_.compute_average) {
                train_margins_for(averaged, margins);
                rec.emp_risk_avg = mean_loss(kind, *data_, margins);
                if (validation_ == nullptr) {
                    rec.err_avg = error_rate(*data_, margins);
                }
                if (config_.check_invariants) {
                    const double mean = weighted_risk_.value() / weight_sum_.value();
                    result_.invariants.weighted_mean.record(rec.emp_risk_avg - mean, 1e-12);
                }
            }
        }
        if (validation_ != nullptr) {
            std::vector<double> margins;
            validation_margins_->compute(coeffs_, support_, margins);
            rec.val_risk_last = mean_loss(kind, *validation_, margins);
            rec.err_last = error_rate(*validation_, margins);
            if (config_.compute_average) {
                validation_margins_->compute(averaged, support_, margins);
                rec.val_risk_avg = mean_loss(kind, *validation_, margins);
                rec.err_avg = error_rate(*validation_, margins);
            }
        }
        result_.trace.push_back(rec);
        if (config_.observer) {
            const training_state state{ result_.trace.back(), coeffs_, averaged };
            return config_.observer(state);
        }
        return true;
    }

    void finish() {
        result_.last.kernel = evaluator_;
        result_.last.coeffs = coeffs_;
        result_.averaged.model.kernel = evaluator_;
        result_.averaged.weight_sum = weight_sum_.value();
        if (config_.compute_average) {
            result_.averaged.model.coeffs = averaged_coefficients();
        } else {
            result_.averaged.model.coeffs.assign(m_, 0.0);
        }
    }

    std::shared_ptr<const dataset> data_;
    loss_spec loss_;
    sgm_run_config config_;
    const dataset *validation_;
    std::size_t m_{ 0 };
    std::size_t cadence_{ 1 };
    std::shared_ptr<const kernel_evaluator> evaluator_;
    std::unique_ptr<gram_cache> cache_;
    std::unique_ptr<external_margins> validation_margins_;

    std::vector<double> coeffs_;
    std::vector<std::size_t> support_;  // sorted indices that ever held a nonzero coefficient
    std::vector<unsigned char> in_support_;
    // Lazy weighted average: partial_[i] holds sum of eta_k c_i^(k) up to the
    // step where coefficient i last changed, at which point the weight sum was
    // flushed_at_[i].
    std::vector<double> partial_;
    std::vector<double> flushed_at_;
    compensated_sum weight_sum_;
    compensated_sum sum_squares_;

    std::vector<std::vector<double>> probes_;
    std::vector<std::vector<double>> probe_margins_;
    std::vector<double> train_margins_;
    compensated_sum weighted_risk_;

    train_result result_;
};

}  // namespace

void invariant_tally::record(const double gap, const double slack) {
    ++checks;
    worst_gap = std::max(worst_gap, gap);
    if (gap > slack) {
        ++violations;
    }
}

double predict(const kernel_model &model, const sparse_vector &x) {
    if (!model.kernel) {
        throw invalid_argument{ "model has no kernel attached" };
    }
    const double norm = squared_norm(x);
    double total = 0.0;
    for (std::size_t i = 0; i < model.coeffs.size(); ++i) {
        if (model.coeffs[i] != 0.0) {
            total += model.coeffs[i] * (*model.kernel)(i, x, norm);
        }
    }
    return total;
}

double predict_label(const kernel_model &model, const sparse_vector &x) { return predict(model, x) >= 0.0 ? 1.0 : -1.0; }

std::vector<double> predict_all(const kernel_model &model, const dataset &data) {
    if (!model.kernel) {
        throw invalid_argument{ "model has no kernel attached" };
    }
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < model.coeffs.size(); ++i) {
        if (model.coeffs[i] != 0.0) {
            support.push_back(i);
        }
    }
    if (model.kernel->spec().is_linear()) {
        const std::vector<double> w = primal_weights(model);
        std::vector<double> out;
        out.reserve(data.size());
        for (const sample &s : data) {
            double total = 0.0;
            for (const feature &f : s.features) {
                if (f.index < w.size()) {
                    total += w[f.index] * f.value;
                }
            }
            out.push_back(total);
        }
        return out;
    }
    external_margins margins{ *model.kernel, data };
    std::vector<double> out;
    margins.compute(model.coeffs, support, out);
    return out;
}

double empirical_risk(const kernel_model &model, const dataset &data, const loss_spec &loss) {
    if (data.empty()) {
        throw invalid_argument{ "empirical risk of an empty dataset" };
    }
    const std::vector<double> margins = predict_all(model, data);
    compensated_sum total;
    for (std::size_t i = 0; i < data.size(); ++i) {
        total.add(value(loss, data[i].label, margins[i]));
    }
    return total.value() / static_cast<double>(data.size());
}

double misclassification_rate(const kernel_model &model, const dataset &data) {
    if (data.empty()) {
        throw invalid_argument{ "misclassification rate of an empty dataset" };
    }
    return error_rate(data, predict_all(model, data));
}

double rkhs_norm(const kernel_model &model) {
    if (!model.kernel) {
        throw invalid_argument{ "model has no kernel attached" };
    }
    const kernel_evaluator &k = *model.kernel;
    double total = 0.0;
    for (std::size_t i = 0; i < model.coeffs.size(); ++i) {
        if (model.coeffs[i] == 0.0) {
            continue;
        }
        double inner = 0.0;
        for (std::size_t j = 0; j < model.coeffs.size(); ++j) {
            if (model.coeffs[j] != 0.0) {
                inner += model.coeffs[j] * k(i, j);
            }
        }
        total += model.coeffs[i] * inner;
    }
    return std::sqrt(std::max(0.0, total));
}

std::vector<double> primal_weights(const kernel_model &model) {
    if (!model.kernel || !model.kernel->spec().is_linear()) {
        throw invalid_argument{ "primal weights exist only for the linear kernel" };
    }
    const dataset &train = model.kernel->train();
    std::vector<double> w(train.dim(), 0.0);
    for (std::size_t i = 0; i < model.coeffs.size(); ++i) {
        if (model.coeffs[i] == 0.0) {
            continue;
        }
        for (const feature &f : train[i].features) {
            w[f.index] += model.coeffs[i] * f.value;
        }
    }
    return w;
}

double iterate_norm_ceiling(const double a0, const double kappa, const double v0, const step_sums &sums) {
    const double ak = a0 * kappa;
    return std::sqrt(ak * ak * sums.sum_squares + 2.0 * v0 * sums.sum);
}

void write_trace_csv(std::ostream &out, std::span<const trace_record> trace) {
    out << trace_csv_header << '\n';
    for (const trace_record &r : trace) {
        std::string line = std::to_string(r.t) + ',' + std::to_string(r.pass) + ',';
        append_real(line, r.eta);
        line += ',';
        append_real(line, r.emp_risk_last);
        line += ',';
        append_real(line, r.emp_risk_avg);
        line += ',';
        if (r.val_risk_last) {
            append_real(line, *r.val_risk_last);
        }
        line += ',';
        if (r.val_risk_avg) {
            append_real(line, *r.val_risk_avg);
        }
        line += ',';
        append_real(line, r.err_last);
        line += ',';
        append_real(line, r.err_avg);
        line += ',';
        append_real(line, r.norm);
        line += ',';
        append_real(line, r.norm_bound);
        out << line << '\n';
    }
}

train_result train(std::shared_ptr<const dataset> data, const kernel_spec &kernel, const loss_spec &loss,
                   const sgm_run_config &config, const dataset *validation) {
    trainer run{ std::move(data), kernel, loss, config, validation };
    return run.run();
}

train_result train(const dataset &data, const kernel_spec &kernel, const loss_spec &loss, const sgm_run_config &config,
                   const dataset *validation) {
    return train(std::make_shared<const dataset>(data), kernel, loss, config, validation);
}

}  // namespace ksgm
