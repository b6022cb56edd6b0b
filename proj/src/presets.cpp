#include "ouinv/presets.hpp"

#include "ouinv/errors.hpp"

namespace ouinv {

Model preset_salogni1d() {
    Mat Q(1, 1), B(1, 1);
    Q << 1.0;
    B << -1.0;
    return build_model(Q, B);
}

Model preset_isotropic2d() {
    return build_model(Mat::Identity(2, 2), -Mat::Identity(2, 2));
}

Model preset_nonnormal2d() {
    Mat B(2, 2);
    B << -1.0, 1.0, 0.0, -2.0;
    return build_model(Mat::Identity(2, 2), B);
}

Model preset_by_name(const std::string& name) {
    if (name == "salogni1d") return preset_salogni1d();
    if (name == "isotropic2d") return preset_isotropic2d();
    if (name == "nonnormal2d") return preset_nonnormal2d();
    throw UnknownFlag("unknown preset: " + name);
}

} // namespace ouinv
