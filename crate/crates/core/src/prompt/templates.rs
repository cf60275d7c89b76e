pub(super) const REQUIREMENTS: &str = "\
- 1NF: atomic columns, no repeating groups (phone1, phone2), a PRIMARY KEY in every table.
- 2NF: no partial dependency of a non-prime column on part of a candidate key.
- 3NF: no transitive dependency: for every X -> A, X is a superkey or A is prime.
";

pub(super) const GENERATION_HEAD: &str = "\
Normalize this schema to {target_nf}.
";

pub(super) const GENERATION_RULES: &str = "\
`-- @fd table: lhs -> rhs` lines are dependencies and `-- @multivalued table.column` marks list columns. Keep every column with its name and type, key split tables with foreign keys and keep the `-- @fd` lines that still hold.
";

pub(super) const GENERATION_TAIL: &str = "
```sql
{schema}```
{feedback}
Reply with the full schema in one ```sql block.
";

pub(super) const VERIFICATION_HEAD: &str = "\
You are a database design reviewer. Check the relational schema below against each normal form up to {target_nf}.

";

pub(super) const VERIFICATION_RULES: &str = "
Functional dependencies appear as `-- @fd table: lhs -> rhs` comments and multivalued columns as `-- @multivalued table.column`. A table's primary key determines all of its columns.
";

pub(super) const VERIFICATION_TAIL: &str = "
Schema:
```sql
{schema}```
{feedback}
Reply with one verdict line per normal form followed by one line per anomaly:
NF1: PASS or FAIL
NF2: PASS or FAIL
NF3: PASS or FAIL
ANOMALY: <normal form> | <NON_ATOMIC, REPEATING_GROUP, MISSING_PK, PARTIAL or TRANSITIVE> | <table> | <columns> | <explanation> | <suggested action>
A failure at one normal form also fails every higher normal form.
";

/// One example touching all three normal forms.
pub(super) const GENERATION_ONE: [&str; 1] = ["\
### Example 1
Input:
CREATE TABLE shipment (ship_id INT, item_id INT, item_name TEXT, carrier_id INT, carrier_name TEXT, tags TEXT, PRIMARY KEY (ship_id, item_id));
-- @fd shipment: item_id -> item_name
-- @fd shipment: ship_id -> carrier_id
-- @fd shipment: carrier_id -> carrier_name
-- @multivalued shipment.tags
Output:
CREATE TABLE shipment (ship_id INT, carrier_id INT, PRIMARY KEY (ship_id), FOREIGN KEY (carrier_id) REFERENCES carrier (carrier_id));
CREATE TABLE shipment_item (ship_id INT, item_id INT, PRIMARY KEY (ship_id, item_id), FOREIGN KEY (ship_id) REFERENCES shipment (ship_id), FOREIGN KEY (item_id) REFERENCES item (item_id));
CREATE TABLE item (item_id INT, item_name TEXT, PRIMARY KEY (item_id));
CREATE TABLE carrier (carrier_id INT, carrier_name TEXT, PRIMARY KEY (carrier_id));
CREATE TABLE shipment_tag (ship_id INT, tags TEXT, PRIMARY KEY (ship_id, tags), FOREIGN KEY (ship_id) REFERENCES shipment (ship_id));
"];

/// One example per normal form.
pub(super) const GENERATION_FEW: [&str; 3] = [
    "\
### Example 1 (1NF)
Input:
CREATE TABLE member (member_id INT, phone1 VARCHAR(20), phone2 VARCHAR(20), PRIMARY KEY (member_id));
Output:
CREATE TABLE member (member_id INT, PRIMARY KEY (member_id));
CREATE TABLE member_phone (member_id INT, seq INT, phone VARCHAR(20), PRIMARY KEY (member_id, seq), FOREIGN KEY (member_id) REFERENCES member (member_id));
",
    "\
### Example 2 (2NF)
Input:
CREATE TABLE grade (student_id INT, course_id INT, score INT, course_title TEXT, PRIMARY KEY (student_id, course_id));
-- @fd grade: course_id -> course_title
Output:
CREATE TABLE grade (student_id INT, course_id INT, score INT, PRIMARY KEY (student_id, course_id), FOREIGN KEY (course_id) REFERENCES course (course_id));
CREATE TABLE course (course_id INT, course_title TEXT, PRIMARY KEY (course_id));
",
    "\
### Example 3 (3NF)
Input:
CREATE TABLE staff (staff_id INT, dept_id INT, dept_name TEXT, PRIMARY KEY (staff_id));
-- @fd staff: dept_id -> dept_name
Output:
CREATE TABLE staff (staff_id INT, dept_id INT, PRIMARY KEY (staff_id), FOREIGN KEY (dept_id) REFERENCES dept (dept_id));
CREATE TABLE dept (dept_id INT, dept_name TEXT, PRIMARY KEY (dept_id));
",
];

pub(super) const VERIFICATION_ONE: [&str; 1] = ["\
### Example 1
Input:
CREATE TABLE shipment (ship_id INT, item_id INT, item_name TEXT, carrier_id INT, carrier_name TEXT, tags TEXT, PRIMARY KEY (ship_id, item_id));
-- @fd shipment: item_id -> item_name
-- @fd shipment: ship_id -> carrier_id
-- @fd shipment: carrier_id -> carrier_name
-- @multivalued shipment.tags
Reply:
NF1: FAIL
NF2: FAIL
NF3: FAIL
ANOMALY: NF1 | NON_ATOMIC | shipment | tags | tags holds several values | move tags into a child table keyed by (ship_id, item_id, tags)
ANOMALY: NF2 | PARTIAL | shipment | item_id, item_name | item_name depends on part of the key | split item_id, item_name into a table keyed by item_id
ANOMALY: NF3 | TRANSITIVE | shipment | carrier_id, carrier_name | carrier_name depends on the non-key carrier_id | split carrier_id, carrier_name into a table keyed by carrier_id
"];

pub(super) const VERIFICATION_FEW: [&str; 3] = [
    "\
### Example 1 (1NF)
Input:
CREATE TABLE member (member_id INT, phone1 VARCHAR(20), phone2 VARCHAR(20), PRIMARY KEY (member_id));
Reply:
NF1: FAIL
NF2: FAIL
NF3: FAIL
ANOMALY: NF1 | REPEATING_GROUP | member | phone1, phone2 | phone repeats across columns | replace phone1, phone2 with a child table holding one phone per row
",
    "\
### Example 2 (2NF)
Input:
CREATE TABLE grade (student_id INT, course_id INT, score INT, course_title TEXT, PRIMARY KEY (student_id, course_id));
-- @fd grade: course_id -> course_title
Reply:
NF1: PASS
NF2: FAIL
NF3: FAIL
ANOMALY: NF2 | PARTIAL | grade | course_id, course_title | course_title depends on part of the key | split course_id, course_title into a table keyed by course_id
",
    "\
### Example 3 (3NF)
Input:
CREATE TABLE staff (staff_id INT, dept_id INT, dept_name TEXT, PRIMARY KEY (staff_id));
-- @fd staff: dept_id -> dept_name
Reply:
NF1: PASS
NF2: PASS
NF3: FAIL
ANOMALY: NF3 | TRANSITIVE | staff | dept_id, dept_name | dept_name depends on the non-key dept_id | split dept_id, dept_name into a table keyed by dept_id
",
];
