#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ricci::cli {

/// Exit-code contract shared by every subcommand.
enum ExitCode : int {
    kOk = 0,
    kNumericalFailure = 1,
    kExtinction = 2,
    kIoFailure = 3,
    kNonzeroSoliton = 4,
    kInvalidConfig = 5,
};

/// One entry of the `verify` report.
struct VerifyCheck {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string detail; // optional human-readable context
};

struct VerifyOptions {
    int n = 1001;
    double tol_scale = 1.0;
    int fixed_point_steps = 2000;
};

/// The invariant suite behind `verify`; independent of the CLI plumbing so
/// tests can call it directly.
std::vector<VerifyCheck> run_verify_suite(const VerifyOptions& opts);

/// Minimal JSON emitter with insertion-ordered keys and %.17g floats, so
/// repeated runs produce byte-identical reports.
class JsonWriter {
public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array(const std::string& key);
    JsonWriter& end_array();
    JsonWriter& begin_object_in_array();
    JsonWriter& field(const std::string& key, double v);
    JsonWriter& field(const std::string& key, int v);
    JsonWriter& field(const std::string& key, bool v);
    JsonWriter& field(const std::string& key, const std::string& v);
    JsonWriter& field_null(const std::string& key);
    JsonWriter& field_opt(const std::string& key, const std::optional<double>& v);
    std::string str() const;

private:
    void comma();
    void indent();
    std::string out_;
    int depth_ = 0;
    bool need_comma_ = false;
};

/// Entry point used by the ricci2d binary.
int run_cli(int argc, const char* const* argv);

} // namespace ricci::cli
