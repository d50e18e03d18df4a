"""
mappings from report fields to Python data types and vice versa are defined in this module
"""
from typing import Any, Dict, List, Type, TypeVar, Union

import numpy as np

from hubcast.statevec import Outcome

T = TypeVar('T')


class FieldMapping:
    """
    A generic mapping from a report field to an attribute of a Python object.
    The default implementation works great for strings, but for more complex types,
    please refer to the subclasses of ``FieldMapping``.

    :param report_field: name of the field in the serialized report
    :param class_field: name of the attribute in the target Python object
    :param field_type: data type of the field
    """

    def __init__(self, report_field: str, class_field: str, field_type: Type[T]):
        self.report_field = report_field
        self.class_field = class_field
        self.field_type = field_type

    def serialize(self, value: T) -> Any:
        """
        Serialize the attribute value to a json compatible value.

        :param value: the value to serialize
        :return: the serialized value
        """
        return str(value)

    def deserialize(self, value: Any, **kwargs) -> T:
        """
        Deserialize the report value to a more useful Python data type.

        :param value: the value as found in the report
        :param kwargs: additional parameters (to be used by subclasses)
        :return: the deserialized value
        """
        return self.field_type(value)

    def __str__(self):
        return f"{self.__class__.__name__} {self.__dict__}"


class NumericFieldMapping(FieldMapping):
    # numpy scalars become plain python numbers, so that json can handle them

    def __init__(self, report_field: str, class_field: str, field_type=float):
        super().__init__(report_field, class_field, field_type=field_type)

    def serialize(self, value: Union[int, float, np.number]) -> Union[int, float]:
        return self.field_type(value)

    def deserialize(self, value: Union[int, float, str], **kwargs) -> Union[int, float]:
        return self.field_type(value)


class BooleanFieldMapping(FieldMapping):

    def __init__(self, report_field: str, class_field: str):
        super().__init__(report_field, class_field, field_type=bool)

    def serialize(self, value: bool) -> bool:
        return bool(value)

    def deserialize(self, value: Any, **kwargs) -> bool:
        return bool(value)


class JsonFieldMapping(FieldMapping):
    # free-form payloads (dicts of parameters, nested results) that are already json compatible

    def __init__(self, report_field: str, class_field: str, field_type=dict):
        super().__init__(report_field, class_field, field_type=field_type)

    def serialize(self, value: Any) -> Any:
        return value

    def deserialize(self, value: Any, **kwargs) -> Any:
        return value


class OutcomeFieldMapping(FieldMapping):

    def __init__(self, report_field: str, class_field: str):
        super().__init__(report_field, class_field, field_type=Outcome)

    def serialize(self, value: Outcome) -> str:
        return str(value)

    def deserialize(self, value: str, **kwargs) -> Outcome:
        return Outcome.from_string(value)


class ComplexArrayFieldMapping(FieldMapping):
    """
    Complex amplitude vectors are written as a list of ``[real, imag]`` pairs.
    The field type is called with the restored numpy array, e.g. ``Statevector``.
    """

    def __init__(self, report_field: str, class_field: str, field_type=np.asarray):
        super().__init__(report_field, class_field, field_type=field_type)

    def serialize(self, value: Any) -> List[List[float]]:
        amps = np.asarray(getattr(value, 'amps', value), dtype=complex)
        return [[float(a.real), float(a.imag)] for a in amps]

    def deserialize(self, value: List[List[float]], **kwargs) -> Any:
        amps = np.array([complex(re, im) for re, im in value], dtype=complex)
        return self.field_type(amps)


class NamedTupleFieldMapping(FieldMapping):
    # named tuples become dictionaries with the tuple's field names as keys

    def serialize(self, value: tuple) -> Dict[str, Any]:
        return {k: (v.item() if isinstance(v, np.generic) else v)
                for k, v in value._asdict().items()}

    def deserialize(self, value: Dict[str, Any], **kwargs) -> tuple:
        return self.field_type(**value)


class ListFieldMapping(FieldMapping):
    # wraps another field mapping, to handle list types
    # e.g. ``ListFieldMapping(NumericFieldMapping('bits_per_node', 'bits_per_node', int))``

    def __init__(self, item_mapping: FieldMapping):
        super().__init__(item_mapping.report_field, item_mapping.class_field, field_type=List)
        self.item_mapping = item_mapping

    def serialize(self, values: List[Any]) -> List[Any]:
        return [self.item_mapping.serialize(item) for item in values]

    def deserialize(self, values: List[Any], **kwargs) -> List[Any]:
        return [self.item_mapping.deserialize(item, **kwargs) for item in values]
