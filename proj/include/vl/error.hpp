#ifndef VL_ERROR_HPP
#define VL_ERROR_HPP

#include <stdexcept>
#include <string>

namespace vl {

/// Base class for every error raised by the toolkit. `kind()` is a stable,
/// single-token class name the CLI prints so failures can be grepped.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define VL_DEFINE_ERROR(Name)                                               \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& what) : Error(#Name, what) {}      \
    }

VL_DEFINE_ERROR(InvalidParameter);
VL_DEFINE_ERROR(RangeError);
VL_DEFINE_ERROR(DataError);
VL_DEFINE_ERROR(SchemaError);
VL_DEFINE_ERROR(IntegrityError);
VL_DEFINE_ERROR(ConfigError);
VL_DEFINE_ERROR(OverflowError);
VL_DEFINE_ERROR(IoError);

#undef VL_DEFINE_ERROR

} // namespace vl

#endif // VL_ERROR_HPP
