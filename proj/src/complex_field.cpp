#include "metatele/complex_field.hpp"

#include <sstream>

namespace metatele {

ComplexField::ComplexField(int n, double pitch, double wavelength, Vec2 origin)
    : n_(n), pitch_(pitch), wavelength_(wavelength), origin_(origin) {
  if (n < 64 || (n % 2) != 0) {
    std::ostringstream os;
    os << "ComplexField: N must be even and >= 64, got " << n;
    throw DomainError(os.str());
  }
  if (!(pitch > 0.0)) throw DomainError("ComplexField: pitch must be > 0");
  if (wavelength < 380 * nm || wavelength > 700 * nm) {
    std::ostringstream os;
    os << "ComplexField: wavelength " << wavelength / nm
       << " nm outside [380, 700] nm";
    throw DomainError(os.str());
  }
  data_.assign(static_cast<std::size_t>(n) * n, complexd{0.0, 0.0});
}

double ComplexField::total_power() const {
  double p = 0.0;
  for (const auto& v : data_) p += std::norm(v);
  return p;
}

void ComplexField::normalize_power() {
  double p = total_power();
  if (!(p > 0.0)) throw DomainError("normalize_power: field has zero power");
  double s = 1.0 / std::sqrt(p);
  for (auto& v : data_) v *= s;
}

}  // namespace metatele
